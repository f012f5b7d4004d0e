"""Newtonian-time trajectories, energy-metric geodesics, and collision probes.

Two flows live on the same charts.  A *trajectory* follows Newtonian time::

    xdd^l = -Gamma_kin^l_ij xd^i xd^j - (M^-1)^lk dV/dx^k

with ``Gamma_kin`` the Christoffel symbols of the bare kinetic metric
``M`` alone.  A *geodesic* follows an affine parameter ``lam`` of the
conformally scaled metric ``g = (E - V) M`` and satisfies the plain
geodesic equation.  On a common energy level the two are the same curves
up to the clock change

    sigma = dlam/dt = (E - V) / sqrt(T),     T = (1/2) g(x', x'),

so the arc-length normalization ``T = 1/2`` gives
``sigma = sqrt(2) (E - V)`` and a trajectory velocity converts to a
unit-speed geodesic velocity by dividing by ``sigma``.

Integration uses an adaptive high-order Runge-Kutta scheme (DOP853) with
terminal events for pair collisions, the triple collision, the boundary
of the allowed region (geodesics only), and the chart poles at
``sin(2 eta) = 0``; a run's ``PathRecord`` stores the sampled states, the
conserved-quantity drift, and the stop cause.  Crossing the upper pole
``eta = pi/2`` is a chart artifact, not a collision: integration stops
there and may be continued after relabelling the bodies
(:func:`relabel_continuation`).

The module also carries the exact homothetic-collapse solution (scale
quadratic in time, with its closed-form collision time), the
second-difference check of the inverse-square identity ``Idd = 4 E`` for
``I = r**2``, arc-length profiles of probe curves running into binary or
triple collisions, and an independent flat-chart integrator of the
primitive equations of motion used as a cross-check oracle.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dataclass_field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp

from .conformal import PotentialKind, separations_sq, shape_potential
from .coords import (
    ChartPoint,
    MassConfig,
    PlanarConfig,
    Space,
    hopf_from_rescaled,
    hopf_velocity_from_zdot,
    jacobi_from_rescaled,
    permute_masses,
    positions_from_jacobi,
    quotient_xi2,
    relabel_rescaled,
    rescaled_from_hopf,
    zdot_from_hopf,
)
from .curvature import _christoffel_stack, christoffel
from .errors import (
    ChartSingular,
    CollisionPole,
    GeometryError,
    InvalidQuotient,
    OutsideHill,
    ZeroSize,
)
from .metrics import MetricField

__all__ = [
    "FlowKind",
    "FlowState",
    "PathRecord",
    "STATUS_COMPLETED",
    "STATUS_HILL",
    "STATUS_COLLISION",
    "STATUS_MAX_STEPS",
    "STATUS_CHART",
    "trajectory_rhs",
    "geodesic_rhs",
    "reparam_sigma",
    "integrate_trajectory",
    "integrate_geodesic",
    "FlowComparison",
    "compare_trajectory_geodesic",
    "homothety_collision_time",
    "homothety_scale_sq",
    "lagrange_jacobi_residual",
    "TargetKind",
    "CollisionTarget",
    "TRIPLE_TARGET",
    "binary_target",
    "LengthProfile",
    "collision_distance_probe",
    "power_law_length_profile",
    "radial_geodesic_residual",
    "relabel_continuation",
    "cartesian_from_chart",
    "CartesianRecord",
    "integrate_trajectory_cartesian",
]


STATUS_COMPLETED = "completed"
STATUS_HILL = "hill-boundary"
STATUS_COLLISION = "collision-threshold"
STATUS_MAX_STEPS = "max-steps"
STATUS_CHART = "chart-boundary"

DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-12
DEFAULT_COLLISION_TOL = 1e-8
DEFAULT_CHART_TOL = 1e-5


class FlowKind(Enum):
    TRAJECTORY = "trajectory"
    GEODESIC = "geodesic"


@dataclass(frozen=True)
class FlowState:
    """One sampled state of a flow: chart position, velocity, and clock."""

    kind: FlowKind
    x: np.ndarray
    v: np.ndarray
    clock: float
    conserved: float  # total energy (trajectory) or T = g(v, v)/2 (geodesic)


def _coerce(x) -> np.ndarray:
    return np.asarray(getattr(x, "coords", lambda: x)(), dtype=float)


def _chart_indices(space: Space) -> dict:
    """Chart positions of the named coordinates for each space."""
    names = space.coord_names
    return {
        "r": names.index("r") if "r" in names else None,
        "eta": names.index("eta"),
        "xi2": names.index("xi2"),
    }


# -- right-hand sides ----------------------------------------------------------


def _state_args(x, v):
    if v is None:  # a FlowState (or anything with .x/.v) was passed
        return np.asarray(x.x, dtype=float), np.asarray(x.v, dtype=float)
    return _coerce(x), np.asarray(v, dtype=float)


def potential_gradient(
    masses: MassConfig, potential: PotentialKind | None, space: Space, x
) -> tuple[float, np.ndarray]:
    """Potential value and its chart gradient, in chart component order."""
    x = _coerce(x)
    grad = np.zeros(space.dim)
    if potential is None:
        return 0.0, grad
    if not space.has_radius:
        raise InvalidQuotient("the potential needs the scale coordinate r")
    idx = _chart_indices(space)
    r = x[idx["r"]]
    if r <= 0.0:
        raise ZeroSize("potential gradient needs r > 0")
    data = shape_potential(masses, potential, x[idx["eta"]], x[idx["xi2"]])
    p = 2 if potential is PotentialKind.INVERSE_SQUARE else 1
    rp = r**p
    value = -data.value / rp
    grad[idx["r"]] = p * data.value / (rp * r)
    grad[idx["eta"]] = -data.d_eta / rp
    grad[idx["xi2"]] = -data.d_xi2 / rp
    return value, grad


def trajectory_rhs(
    kinetic_field: MetricField, potential: PotentialKind | None, x, v=None
) -> np.ndarray:
    """Newtonian-time chart acceleration ``-Gamma_kin[v, v] - M^-1 grad V``.

    ``kinetic_field`` must carry ``potential=None`` (it supplies the bare
    kinetic metric and the masses); ``potential`` selects the force law.
    """
    if kinetic_field.potential is not None:
        raise ValueError("pass the kinetic-only field (potential=None)")
    x, v = _state_args(x, v)
    gamma, G, _ = _christoffel_stack(kinetic_field, x[None, :])
    acc = -np.einsum("lij,i,j->l", gamma[0], v, v)
    _, grad = potential_gradient(
        kinetic_field.masses, potential, kinetic_field.space, x
    )
    if grad.any():
        acc -= np.linalg.solve(G[0] / kinetic_field.conformal_const, grad)
    return acc


def geodesic_rhs(field: MetricField, x, v=None) -> np.ndarray:
    """Affine-parameter chart acceleration ``-Gamma[v, v]`` of the scaled metric."""
    x, v = _state_args(x, v)
    gamma = christoffel(field, x)
    return -np.einsum("lij,i,j->l", gamma, v, v)


def reparam_sigma(field: MetricField, x, v=None) -> float:
    """Clock rate ``sigma = dlam/dt = (E - V)/sqrt(T)`` of a flow state.

    ``T`` is half the squared speed of the state's velocity in the scaled
    metric; the arc-length normalization ``T = 1/2`` gives
    ``sigma = sqrt(2) (E - V)``, and a trajectory state (physical chart
    velocity, clock = t) gives ``sigma = 1`` identically.
    """
    if not field.space.has_radius:
        raise InvalidQuotient("the clock map needs the scale coordinate r")
    x, v = _state_args(x, v)
    c, _ = field.conformal_with_grad(x)
    g, _ = field.metric(x)
    kinetic = 0.5 * float(v @ g @ v)
    if kinetic <= 0.0:
        raise ValueError("clock rate needs a nonzero velocity")
    return c / math.sqrt(kinetic)


# -- path records --------------------------------------------------------------


@dataclass
class PathRecord:
    """Sampled flow with its stop cause and conserved-quantity drift."""

    field: MetricField
    kind: FlowKind
    status: str
    message: str
    clock: np.ndarray  # (N,) integration parameter: t or lam
    states: np.ndarray  # (N, dim)
    velocities: np.ndarray  # (N, dim)
    conserved0: float
    drift: np.ndarray  # (N,) conserved quantity minus its launch value
    phys_time: np.ndarray | None  # geodesics on scale-carrying charts: t(lam)
    events: dict[str, np.ndarray] = dataclass_field(default_factory=dict)
    nfev: int = 0
    dense: Callable | None = None  # interpolant lam -> full ODE state

    @property
    def max_drift(self) -> float:
        return float(np.max(np.abs(self.drift)))

    def state(self, i: int) -> FlowState:
        return FlowState(
            kind=self.kind,
            x=self.states[i].copy(),
            v=self.velocities[i].copy(),
            clock=float(self.clock[i]),
            conserved=self.conserved0 + float(self.drift[i]),
        )

    @property
    def final_state(self) -> FlowState:
        return self.state(len(self.clock) - 1)

    def sample(self, clock_values) -> np.ndarray:
        """Chart positions at the given clock values (dense interpolation)."""
        if self.dense is None:
            raise ValueError("record was integrated without dense output")
        dim = self.states.shape[1]
        ts = np.atleast_1d(np.asarray(clock_values, dtype=float))
        return np.stack([self.dense(t)[:dim] for t in ts])

    def sample_velocity(self, clock_values) -> np.ndarray:
        if self.dense is None:
            raise ValueError("record was integrated without dense output")
        dim = self.states.shape[1]
        ts = np.atleast_1d(np.asarray(clock_values, dtype=float))
        return np.stack([self.dense(t)[dim : 2 * dim] for t in ts])

    def to_csv(self, path) -> None:
        """Write the sampled path as deterministic CSV (LF endings)."""
        names = self.field.space.coord_names
        cols = ["clock"]
        if self.phys_time is not None:
            cols.append("t")
        cols += list(names) + [f"v{n}" for n in names] + ["drift"]
        pot = "none" if self.field.potential is None else self.field.potential.value
        with open(path, "w", newline="\n") as fh:
            fh.write(
                f"# space={self.field.space.value} potential={pot} "
                f"energy={self.field.energy!r} kind={self.kind.value} "
                f"status={self.status}\n"
            )
            fh.write(f"# conserved0={self.conserved0!r}\n")
            fh.write(",".join(cols) + "\n")
            for i in range(len(self.clock)):
                row = [self.clock[i]]
                if self.phys_time is not None:
                    row.append(self.phys_time[i])
                row += list(self.states[i]) + list(self.velocities[i])
                row.append(self.drift[i])
                fh.write(",".join("%.17g" % val for val in row) + "\n")


# -- event assembly ------------------------------------------------------------


def _make_events(
    field: MetricField,
    kind: FlowKind,
    x0: np.ndarray,
    dim: int,
    collision_tol: float,
    chart_tol: float,
    hill_floor: float,
    stop_at_time: float | None,
):
    """Terminal event functions plus the status each one maps to."""
    idx = _chart_indices(field.space)
    ieta, ixi2, ir = idx["eta"], idx["xi2"], idx["r"]
    masses = field.masses
    events: list[tuple[str, str, Callable]] = []

    if collision_tol > 0.0:
        for k, name in enumerate(("pair12", "pair23", "pair31")):

            def pair_event(t, y, k=k):
                seps = separations_sq(masses, y[ieta], y[ixi2])
                return math.sqrt(max(seps[k], 0.0)) - collision_tol

            events.append((name, STATUS_COLLISION, pair_event))
        if ir is not None:
            r0 = x0[ir]

            def triple_event(t, y):
                return y[ir] / r0 - collision_tol

            events.append(("triple", STATUS_COLLISION, triple_event))

    def upper_pole(t, y):
        return (math.pi / 2.0 - y[ieta]) - chart_tol

    events.append(("chart-upper", STATUS_CHART, upper_pole))
    if field.potential is None:
        # With a potential the eta -> 0 boundary is the pair-(1,2)
        # collision pole and the pair event governs; without one it is a
        # plain chart pole.
        def lower_pole(t, y):
            return y[ieta] - chart_tol

        events.append(("chart-lower", STATUS_CHART, lower_pole))

    if (
        kind is FlowKind.GEODESIC
        and field.potential is not None
        and field.energy < 0.0
    ):
        floor = hill_floor if hill_floor > 0.0 else 1e-6 * abs(field.energy)

        def hill_event(t, y):
            try:
                c, _ = field.conformal_with_grad(y[:dim])
            except GeometryError:
                return -floor
            return c - floor

        events.append(("hill", STATUS_HILL, hill_event))

    if stop_at_time is not None:

        def time_event(t, y):
            return y[-1] - stop_at_time

        events.append(("time-horizon", STATUS_COMPLETED, time_event))

    for _, _, fn in events:
        fn.terminal = True
    return events


def _run_ivp(rhs, span, y0, events, rtol, atol, max_step):
    kwargs = {} if max_step is None else {"max_step": max_step}
    return solve_ivp(
        rhs,
        span,
        y0,
        method="DOP853",
        dense_output=True,
        rtol=rtol,
        atol=atol,
        events=[fn for _, _, fn in events],
        **kwargs,
    )


def _finish_record(field, kind, sol, events, dim, conserved0, conserved_fn, track_time):
    ys = sol.y.T
    status, message = STATUS_COMPLETED, "reached the requested span"
    if sol.status == 1:
        for (name, ev_status, _), hits in zip(events, sol.t_events):
            if len(hits):
                status, message = ev_status, f"terminal event {name}"
                break
    elif sol.status == -1:
        status, message = STATUS_MAX_STEPS, sol.message
        if field.potential is not None:
            # The chart knows pair separations only to ~1e-16 absolute in
            # the squared channel, so a collision approach drowns the
            # stepper in evaluation noise long before the separation
            # threshold is reachable.  A step-size underflow right next
            # to a pole is the pole's doing: report it as the collision.
            idx = _chart_indices(field.space)
            x_end, x_start = ys[-1][:dim], ys[0][:dim]
            seps = separations_sq(field.masses, x_end[idx["eta"]], x_end[idx["xi2"]])
            rel = math.sqrt(max(min(seps), 0.0))
            ir = idx["r"]
            if ir is not None and x_start[ir] > 0.0:
                rel = min(rel, x_end[ir] / x_start[ir])
            if rel < 1e-3:
                status = STATUS_COLLISION
                message = (
                    f"step-size underflow at relative separation {rel:.3e} "
                    "(collision pole)"
                )
    states = ys[:, :dim]
    vels = ys[:, dim : 2 * dim]
    drift = np.array([conserved_fn(s, v) for s, v in zip(states, vels)]) - conserved0
    event_times = {
        name: hits
        for (name, _, _), hits in zip(events, sol.t_events)
        if len(hits)
    }
    return PathRecord(
        field=field,
        kind=kind,
        status=status,
        message=message,
        clock=sol.t.copy(),
        states=states,
        velocities=vels,
        conserved0=conserved0,
        drift=drift,
        phys_time=ys[:, -1].copy() if track_time else None,
        events=event_times,
        nfev=sol.nfev,
        dense=sol.sol,
    )


def _nan_guard(rhs, size):
    """Turn geometry errors inside trial steps into NaNs the stepper rejects."""
    bad = np.full(size, np.nan)

    def guarded(t, y):
        try:
            # Trial steps may poke past chart edges; float warnings from
            # those throwaway evaluations are noise, so keep them quiet.
            with np.errstate(all="ignore"):
                return rhs(t, y)
        except GeometryError:
            return bad

    return guarded


def integrate_trajectory(
    field: MetricField,
    x0,
    v0,
    t_final: float,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float | None = None,
    collision_tol: float = DEFAULT_COLLISION_TOL,
    chart_tol: float = DEFAULT_CHART_TOL,
) -> PathRecord:
    """Integrate the Newtonian-time equations of motion on a chart.

    The field's potential selects the force law; its energy plays no role
    (the energy of the run is set by the initial data and is recorded,
    with its drift, on the returned record).
    """
    if not field.space.has_radius:
        raise InvalidQuotient("trajectories need the scale coordinate r")
    x0 = _coerce(x0)
    v0 = np.asarray(v0, dtype=float)
    dim = field.space.dim
    kinetic = MetricField(field.space, potential=None, masses=field.masses)

    def energy(x, v):
        g, _ = kinetic.metric(x)
        value, _ = potential_gradient(field.masses, field.potential, field.space, x)
        return 0.5 * float(v @ g @ v) + value

    def rhs(t, y):
        x, v = y[:dim], y[dim:]
        acc = trajectory_rhs(kinetic, field.potential, x, v)
        return np.concatenate([v, acc])

    e0 = energy(x0, v0)
    events = _make_events(
        field, FlowKind.TRAJECTORY, x0, dim, collision_tol, chart_tol, 0.0, None
    )
    sol = _run_ivp(
        _nan_guard(rhs, 2 * dim),
        (0.0, float(t_final)),
        np.concatenate([x0, v0]),
        events,
        rtol,
        atol,
        max_step,
    )
    return _finish_record(
        field, FlowKind.TRAJECTORY, sol, events, dim, e0, energy, track_time=False
    )


def integrate_geodesic(
    field: MetricField,
    x0,
    v0,
    lam_final: float,
    *,
    stop_at_time: float | None = None,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    max_step: float | None = None,
    collision_tol: float = DEFAULT_COLLISION_TOL,
    chart_tol: float = DEFAULT_CHART_TOL,
    hill_floor: float = 0.0,
) -> PathRecord:
    """Integrate the geodesic equation of the field's scaled metric.

    On scale-carrying charts with a potential, the physical clock
    ``t(lam)`` with ``dt/dlam = sqrt(T)/(E - V)`` is integrated alongside
    and stored as ``phys_time``; ``stop_at_time`` ends the run when it
    reaches the given value.
    """
    x0 = _coerce(x0)
    v0 = np.asarray(v0, dtype=float)
    dim = field.space.dim
    track_time = field.space.has_radius and field.potential is not None

    def kinetic_of(x, v):
        g, _ = field.metric(x)
        return 0.5 * float(v @ g @ v)

    if track_time:

        def rhs(lam, y):
            x, v = y[:dim], y[dim : 2 * dim]
            gamma, G, _ = _christoffel_stack(field, x[None, :])
            acc = -np.einsum("lij,i,j->l", gamma[0], v, v)
            c, _ = field.conformal_with_grad(x)
            kin = 0.5 * float(v @ G[0] @ v)
            return np.concatenate([v, acc, [math.sqrt(max(kin, 0.0)) / c]])

        y0 = np.concatenate([x0, v0, [0.0]])
    else:
        if stop_at_time is not None:
            raise ValueError("no physical clock on this chart")

        def rhs(lam, y):
            x, v = y[:dim], y[dim : 2 * dim]
            acc = geodesic_rhs(field, x, v)
            return np.concatenate([v, acc])

        y0 = np.concatenate([x0, v0])

    events = _make_events(
        field,
        FlowKind.GEODESIC,
        x0,
        dim,
        collision_tol,
        chart_tol,
        hill_floor,
        stop_at_time,
    )
    t0 = kinetic_of(x0, v0)
    sol = _run_ivp(
        _nan_guard(rhs, len(y0)),
        (0.0, float(lam_final)),
        y0,
        events,
        rtol,
        atol,
        max_step,
    )
    return _finish_record(
        field, FlowKind.GEODESIC, sol, events, dim, t0, kinetic_of, track_time
    )


# -- trajectory vs geodesic ----------------------------------------------------


@dataclass
class FlowComparison:
    """Pointwise agreement of a trajectory and the reclocked geodesic."""

    max_deviation: float
    times: np.ndarray
    trajectory_states: np.ndarray
    geodesic_states: np.ndarray
    trajectory: PathRecord
    geodesic: PathRecord


def compare_trajectory_geodesic(
    field: MetricField,
    x0,
    v0,
    horizon: float,
    *,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    lam_cap: float = 200.0,
) -> FlowComparison:
    """Integrate both flows from shared initial data and compare positions.

    The trajectory runs in Newtonian time over ``[0, horizon]``.  The
    geodesic starts with the arc-length-normalized velocity
    ``v0 / (sqrt(2) (E - V))`` and runs in arc length until its physical
    clock reaches the horizon; positions are then compared at the
    geodesic's own sample times through the trajectory's dense output.
    """
    x0 = _coerce(x0)
    v0 = np.asarray(v0, dtype=float)
    traj = integrate_trajectory(field, x0, v0, horizon, rtol=rtol, atol=atol)
    if traj.status != STATUS_COMPLETED:
        raise RuntimeError(f"trajectory stopped early: {traj.status}")
    if abs(traj.conserved0 - field.energy) > 1e-8 * max(1.0, abs(field.energy)):
        raise ValueError(
            f"initial data has energy {traj.conserved0!r}, but the metric "
            f"is scaled for E={field.energy!r}"
        )
    c0, _ = field.conformal_with_grad(x0)
    sigma0 = math.sqrt(2.0) * c0
    geo = integrate_geodesic(
        field,
        x0,
        v0 / sigma0,
        lam_cap,
        stop_at_time=horizon,
        rtol=rtol,
        atol=atol,
    )
    if geo.phys_time is None or geo.phys_time[-1] < horizon * (1.0 - 1e-9):
        raise RuntimeError(f"geodesic stopped before the horizon: {geo.status}")
    mask = geo.phys_time <= horizon * (1.0 + 1e-12)
    times = np.clip(geo.phys_time[mask], 0.0, horizon)
    geo_states = geo.states[mask]
    traj_states = traj.sample(times)
    dev = float(np.max(np.abs(traj_states - geo_states)))
    return FlowComparison(dev, times, traj_states, geo_states, traj, geo)


# -- homothetic collapse -------------------------------------------------------


def homothety_collision_time(
    r0: float, kappa: float, *, G: float = 1.0, m: float = 1.0
) -> float:
    """Collapse time of the equal-mass homothetic solution.

    Radial infall from size ``r0`` at the central configuration obeys
    ``r'' = -6 G m**3 / r**3`` with the conserved
    ``kappa = r'**2 - 6 G m**3 / r**2`` (twice the energy), so
    ``r**2`` is quadratic in time and vanishes at::

        t_c = r0**2 / (sqrt(6 G m**3) (1 + sqrt(1 + kappa r0**2 / 6 G m**3)))

    which reduces to ``r0**2 / (2 sqrt(6 G m**3))`` as ``kappa -> 0``.
    """
    if r0 <= 0.0:
        raise ValueError("needs r0 > 0")
    a6 = 6.0 * G * m**3
    disc = 1.0 + kappa * r0 * r0 / a6
    if disc < 0.0:
        raise ValueError("kappa below the inbound-solution range")
    return r0 * r0 / (math.sqrt(a6) * (1.0 + math.sqrt(disc)))


def homothety_scale_sq(
    t, r0: float, rdot0: float, *, G: float = 1.0, m: float = 1.0
):
    """Exact squared size ``r(t)**2 = r0**2 + 2 r0 rdot0 t + kappa t**2``."""
    t = np.asarray(t, dtype=float)
    kappa = rdot0 * rdot0 - 6.0 * G * m**3 / (r0 * r0)
    out = r0 * r0 + 2.0 * r0 * rdot0 * t + kappa * t * t
    return float(out) if out.ndim == 0 else out


def lagrange_jacobi_residual(record: PathRecord, *, points: int = 41) -> float:
    """Max deviation of the second difference of ``I = r**2`` from ``4 E``.

    Valid for inverse-square trajectories on scale-carrying charts, where
    the identity makes ``I`` exactly quadratic in time.
    """
    if record.kind is not FlowKind.TRAJECTORY:
        raise ValueError("the identity applies to Newtonian-time trajectories")
    if record.field.potential is not PotentialKind.INVERSE_SQUARE:
        raise ValueError("the identity holds for the 1/r**2 potential only")
    if not record.field.space.has_radius:
        raise InvalidQuotient("needs the scale coordinate r")
    ir = _chart_indices(record.field.space)["r"]
    ts = np.linspace(record.clock[0], record.clock[-1], points)
    dt = ts[1] - ts[0]
    rr = record.sample(ts)[:, ir]
    moment = rr * rr
    second = (moment[:-2] - 2.0 * moment[1:-1] + moment[2:]) / (dt * dt)
    return float(np.max(np.abs(second - 4.0 * record.conserved0)))


# -- collision-distance probes -------------------------------------------------


class TargetKind(Enum):
    TRIPLE = "triple"
    BINARY = "binary"


@dataclass(frozen=True)
class CollisionTarget:
    """A collision stratum to probe: the triple point or one pair."""

    kind: TargetKind
    pair: tuple[int, int] = (1, 2)


TRIPLE_TARGET = CollisionTarget(TargetKind.TRIPLE)


def binary_target(pair: tuple[int, int] = (1, 2)) -> CollisionTarget:
    return CollisionTarget(TargetKind.BINARY, tuple(sorted(pair)))


@dataclass(frozen=True)
class LengthProfile:
    """Arc length of a probe curve as a function of its cutoff.

    ``lengths[k]`` is the length from ``cutoffs[k]`` up to ``start`` along
    the varied coordinate.  ``slope`` is the final growth rate per unit
    ``log(1/cutoff)``; ``limit`` is the geometric-tail extrapolation of
    the total length when that converges, else None.
    """

    coordinate: str
    start: float
    cutoffs: np.ndarray
    lengths: np.ndarray
    slope: float
    limit: float | None
    classification: str  # "finite" | "log-divergent" | "power-divergent"


def _profile_from_integrand(
    integrand: Callable[[float], float],
    coordinate: str,
    start: float,
    cutoff: float,
    ratio: float,
    max_rungs: int,
) -> LengthProfile:
    if not 0.0 < cutoff < start:
        raise ValueError("cutoff must lie strictly between 0 and the start value")
    n = max(3, int(math.floor(math.log(cutoff / start) / math.log(ratio))))
    n = min(n, max_rungs)
    cuts = start * ratio ** np.arange(1, n + 1)
    lengths = np.empty(n)
    upper = start
    total = 0.0
    for k, eps in enumerate(cuts):
        with warnings.catch_warnings():
            # Divergent profiles are probed on purpose; quad's roundoff
            # complaint at the deepest rungs carries no information here.
            warnings.simplefilter("ignore", IntegrationWarning)
            seg, _ = quad(integrand, eps, upper, limit=200)
        total += seg
        lengths[k] = total
        upper = eps
    inc_last = lengths[-1] - lengths[-2]
    inc_prev = lengths[-2] - lengths[-3]
    scale = max(abs(lengths[-1]), 1.0)
    if inc_last <= 1e-12 * scale:
        classification, limit = "finite", float(lengths[-1])
    else:
        q = inc_last / inc_prev
        if q < 0.75:
            classification = "finite"
            limit = float(lengths[-1] + inc_last * q / (1.0 - q))
        elif q <= 1.3:
            classification, limit = "log-divergent", None
        else:
            classification, limit = "power-divergent", None
    slope = float(inc_last / math.log(1.0 / ratio))
    return LengthProfile(
        coordinate=coordinate,
        start=float(start),
        cutoffs=cuts,
        lengths=lengths,
        slope=slope,
        limit=limit,
        classification=classification,
    )


_PAIR_PERM = {(1, 2): (1, 2, 3), (2, 3): (2, 3, 1), (1, 3): (3, 1, 2)}


def _relabel_chart_point(space: Space, x: np.ndarray, masses: MassConfig, perm):
    """The same physical configuration in the chart of relabelled bodies."""
    idx = _chart_indices(space)
    r = x[idx["r"]] if idx["r"] is not None else 1.0
    xi1 = x[space.coord_names.index("xi1")] if space.has_rotation else 0.0
    lifted = ChartPoint.c2(r, x[idx["eta"]], xi1, x[idx["xi2"]])
    z1, z2 = rescaled_from_hopf(lifted)
    z1n, z2n, new_masses = relabel_rescaled(z1, z2, masses, perm)
    moved = hopf_from_rescaled(z1n, z2n)
    out = np.empty(space.dim)
    if idx["r"] is not None:
        out[idx["r"]] = moved.r
    out[idx["eta"]] = moved.eta
    if space.has_rotation:
        out[space.coord_names.index("xi1")] = moved.xi1
        out[idx["xi2"]] = moved.xi2
    else:
        out[idx["xi2"]] = quotient_xi2(moved.xi2)
    return out, new_masses


def collision_distance_probe(
    metric_like,
    start,
    target: CollisionTarget,
    cutoff: float,
    *,
    ratio: float = 0.25,
    max_rungs: int = 24,
) -> LengthProfile:
    """Arc length of the standard probe curve into a collision stratum.

    Triple target: the radial curve (only ``r`` varies, angles frozen)
    from the start point down to ``r = cutoff``.  Binary target: the
    curve in ``eta`` (everything else frozen) down to ``eta = cutoff``,
    after relabelling bodies so the probed pair collides at ``eta = 0``.
    Lengths are measured in the given metric (a field or one of the
    near-collision model metrics).
    """
    x0 = _coerce(start).copy()
    names = tuple(metric_like.coord_names)
    if target.kind is TargetKind.TRIPLE:
        varied = "r"
        if varied not in names:
            raise InvalidQuotient("this chart has no scale coordinate to probe")
    else:
        varied = "eta"
        pair = tuple(sorted(target.pair))
        if pair not in _PAIR_PERM:
            raise ValueError(f"unknown pair {target.pair}")
        perm = _PAIR_PERM[pair]
        if perm != (1, 2, 3):
            if not isinstance(metric_like, MetricField):
                raise ValueError(
                    "relabelled binary probes need a full metric field"
                )
            x0, new_masses = _relabel_chart_point(
                metric_like.space, x0, metric_like.masses, perm
            )
            metric_like = MetricField(
                metric_like.space,
                potential=metric_like.potential,
                energy=metric_like.energy,
                masses=new_masses,
                conformal_const=metric_like.conformal_const,
            )
        if varied not in names:
            raise ValueError("this chart has no eta coordinate")
    ivar = names.index(varied)

    def integrand(s: float) -> float:
        xs = x0.copy()
        xs[ivar] = s
        g, _ = metric_like.metric(xs)
        return math.sqrt(max(g[ivar, ivar], 0.0))

    return _profile_from_integrand(
        integrand, varied, float(x0[ivar]), cutoff, ratio, max_rungs
    )


def power_law_length_profile(
    n: float,
    eta0: float,
    cutoff: float,
    *,
    r: float = 1.0,
    xi2: float = 0.0,
    masses: MassConfig | None = None,
    ratio: float = 0.25,
    max_rungs: int = 24,
) -> LengthProfile:
    """Binary probe under a model conformal factor ``1/d12**n``.

    The curve runs in ``eta`` at frozen ``r`` and ``xi2`` with line
    element ``sqrt(d12**-n) r d eta``, so the length converges iff
    ``n < 2`` (the pair separation vanishes linearly in ``eta``).
    """
    mc = MassConfig.equal() if masses is None else masses

    def integrand(eta: float) -> float:
        sep = r * math.sqrt(separations_sq(mc, eta, xi2)[0])
        return r * sep ** (-0.5 * n)

    return _profile_from_integrand(integrand, "eta", eta0, cutoff, ratio, max_rungs)


# -- radial curves and relabelling ---------------------------------------------


def radial_geodesic_residual(field: MetricField, x) -> float:
    """Angular acceleration a frozen-angle radial curve would need.

    A radial curve is a (pre-)geodesic iff every angular Christoffel
    component ``Gamma^i_rr`` vanishes, which picks out the critical
    angular locations of the shape potential.
    """
    if not field.space.has_radius:
        raise InvalidQuotient("radial curves need the scale coordinate r")
    x = _coerce(x)
    ir = _chart_indices(field.space)["r"]
    gamma = christoffel(field, x)
    rows = [i for i in range(field.space.dim) if i != ir]
    return float(np.max(np.abs(gamma[rows, ir, ir])))


def relabel_continuation(field: MetricField, x, v, perm: tuple[int, int, int]):
    """Re-express a chart state after relabelling the bodies.

    Used to continue integration through the upper chart pole
    ``eta = pi/2`` (body 3 at the barycenter), which is not a collision:
    stop at the pole, relabel, restart.  Returns
    ``(new_field, new_point, new_velocity)``.  Rotation-reduced states
    are lifted horizontally (``xid1 = cos(2 eta) xid2``, zero angular
    momentum) before relabelling.
    """
    if field.space not in (Space.C2, Space.R3):
        raise InvalidQuotient("relabelling continuation works on C2 or R3 charts")
    x = _coerce(x)
    v = np.asarray(v, dtype=float)
    if field.space is Space.C2:
        x4, v4 = x, v
    else:
        r, eta, xi2 = x
        x4 = np.array([r, eta, 0.0, xi2])
        v4 = np.array([v[0], v[1], math.cos(2.0 * eta) * v[2], v[2]])
    z1, z2 = rescaled_from_hopf(ChartPoint.c2(*x4))
    zd1, zd2 = zdot_from_hopf(x4, v4)
    z1n, z2n, new_masses = relabel_rescaled(z1, z2, field.masses, perm)
    zd1n, zd2n, _ = relabel_rescaled(zd1, zd2, field.masses, perm)
    moved = hopf_from_rescaled(z1n, z2n)
    v4n = hopf_velocity_from_zdot(moved.coords(), zd1n, zd2n)
    new_field = MetricField(
        field.space,
        potential=field.potential,
        energy=field.energy,
        masses=new_masses,
        conformal_const=field.conformal_const,
    )
    if field.space is Space.C2:
        return new_field, moved, v4n
    horizontal = math.cos(2.0 * moved.eta) * v4n[3]
    if abs(v4n[2] - horizontal) > 1e-8 * max(1.0, float(np.max(np.abs(v4n)))):
        raise ValueError("state carries angular momentum; not an R3 flow")
    point = ChartPoint.r3(moved.r, moved.eta, quotient_xi2(moved.xi2))
    velocity = np.array([v4n[0], v4n[1], v4n[3]])
    return new_field, point, velocity


# -- flat-chart oracle ---------------------------------------------------------


def cartesian_from_chart(masses: MassConfig, x, v=None):
    """Planar positions (and velocities) of a chart state, barycenter at 0.

    Rotation-reduced states are lifted with ``xi1 = 0`` and the
    horizontal (zero-angular-momentum) velocity.
    """
    x = _coerce(x)
    if len(x) == 3:  # R3 state
        r, eta, xi2 = x
        x4 = np.array([r, eta, 0.0, xi2])
        v4 = None
        if v is not None:
            v = np.asarray(v, dtype=float)
            v4 = np.array([v[0], v[1], math.cos(2.0 * eta) * v[2], v[2]])
    else:
        x4 = x
        v4 = None if v is None else np.asarray(v, dtype=float)
    z1, z2 = rescaled_from_hopf(ChartPoint.c2(*x4))
    J1, J2 = jacobi_from_rescaled(z1, z2, masses)
    config = positions_from_jacobi(J1, J2, 0.0, masses)
    if v4 is None:
        return config
    zd1, zd2 = zdot_from_hopf(x4, v4)
    Jd1, Jd2 = jacobi_from_rescaled(zd1, zd2, masses)
    vels = positions_from_jacobi(Jd1, Jd2, 0.0, masses)
    return config, vels.positions


@dataclass
class CartesianRecord:
    """Independent flat-chart integration of the primitive equations."""

    masses: MassConfig
    potential: PotentialKind | None
    clock: np.ndarray
    positions: np.ndarray  # (N, 3) complex
    velocities: np.ndarray  # (N, 3) complex
    energy0: float
    drift: np.ndarray
    dense: Callable

    @property
    def max_drift(self) -> float:
        return float(np.max(np.abs(self.drift))) if len(self.drift) else 0.0

    def positions_at(self, t: float) -> np.ndarray:
        y = self.dense(t)
        return y[0:6:2] + 1j * y[1:6:2]

    def velocities_at(self, t: float) -> np.ndarray:
        y = self.dense(t)
        return y[6:12:2] + 1j * y[7:12:2]


def integrate_trajectory_cartesian(
    masses: MassConfig,
    positions,
    velocities,
    t_final: float,
    potential: PotentialKind | None = PotentialKind.INVERSE_SQUARE,
    *,
    rtol: float = 1e-12,
    atol: float = 1e-14,
) -> CartesianRecord:
    """Integrate the primitive planar equations of motion directly.

    Positions and velocities are complex numbers (one per body) or a
    ``PlanarConfig``; this bypasses every chart construction and serves
    as the cross-check oracle for the chart integrators.
    """
    if isinstance(positions, PlanarConfig):
        positions = positions.positions
    pos = [complex(p) for p in positions]
    vel = [complex(p) for p in velocities]
    ms = (masses.m1, masses.m2, masses.m3)
    G = masses.G
    pairs = ((0, 1), (1, 2), (2, 0))

    def unpack(y):
        return y[0:6:2] + 1j * y[1:6:2], y[6:12:2] + 1j * y[7:12:2]

    def rhs(t, y):
        xs, vs = unpack(y)
        acc = np.zeros(3, dtype=complex)
        if potential is not None:
            for i, j in pairs:
                d = xs[i] - xs[j]
                d2 = (d * d.conjugate()).real
                if potential is PotentialKind.INVERSE_SQUARE:
                    pull = 2.0 * G * d / (d2 * d2)
                else:
                    pull = G * d / d2**1.5
                acc[i] -= ms[j] * pull
                acc[j] += ms[i] * pull
        out = np.empty(12)
        out[0:6:2], out[1:6:2] = vs.real, vs.imag
        out[6:12:2], out[7:12:2] = acc.real, acc.imag
        return out

    def energy(y):
        xs, vs = unpack(y)
        kin = 0.5 * sum(m * (vv * vv.conjugate()).real for m, vv in zip(ms, vs))
        pot = 0.0
        if potential is not None:
            for i, j in pairs:
                d = xs[i] - xs[j]
                d2 = (d * d.conjugate()).real
                if potential is PotentialKind.INVERSE_SQUARE:
                    pot -= G * ms[i] * ms[j] / d2
                else:
                    pot -= G * ms[i] * ms[j] / math.sqrt(d2)
        return kin + pot

    y0 = np.empty(12)
    y0[0:6:2] = [p.real for p in pos]
    y0[1:6:2] = [p.imag for p in pos]
    y0[6:12:2] = [p.real for p in vel]
    y0[7:12:2] = [p.imag for p in vel]
    sol = solve_ivp(
        rhs,
        (0.0, float(t_final)),
        y0,
        method="DOP853",
        dense_output=True,
        rtol=rtol,
        atol=atol,
    )
    if sol.status != 0:
        raise RuntimeError(f"oracle integration failed: {sol.message}")
    ys = sol.y.T
    xs = ys[:, 0:6:2] + 1j * ys[:, 1:6:2]
    vs = ys[:, 6:12:2] + 1j * ys[:, 7:12:2]
    e0 = energy(y0)
    drift = np.array([energy(y) for y in ys]) - e0
    return CartesianRecord(
        masses=masses,
        potential=potential,
        clock=sol.t.copy(),
        positions=xs,
        velocities=vs,
        energy0=e0,
        drift=drift,
        dense=sol.sol,
    )
