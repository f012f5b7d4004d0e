"""Linear stability of geodesics: tidal operator, spectrum, deviation fields.

A geodesic with velocity ``xdot`` carries the symmetric tidal operator

    S(y) = R(y, xdot) xdot,

whose metric-orthonormal eigenpairs ``(kappa_m, f_m)`` control geodesic
deviation: in a parallel-transported frame the deviation components c
obey ``c'' = -S c``, so a direction with ``kappa_m > 0`` makes nearby
geodesics oscillate about the reference one (stable), ``kappa_m < 0``
drives exponential separation (unstable), and the velocity itself is
always a zero mode (neutral).  Each eigenvalue factors through the
sectional curvature of the plane it spans with the velocity,

    kappa_m = area(f_m, xdot)^2 * K(f_m, xdot),

which is the cross-check stored on every report.

``stability_tensor`` assembles the operator and its spectrum at a point;
``stability_verdicts`` folds the eigendirection verdicts back onto the
chart axes; ``jacobi_field_evolve`` integrates the deviation equation
along a recorded geodesic, carrying the parallel frame as an auxiliary
ODE instead of assuming any closed-form transport.  Closed forms for the
two rigid reference motions -- uniform rotation of the equilateral
triangle and pure radial scaling -- back the numeric path in tests and
in the CLI.

Deviation initial data uses coordinate derivatives (``ydot0`` is the
plain lambda-derivative of the chart components), matching what
differencing two nearby geodesics produces; the covariant correction
``Gamma(xdot, y)`` is applied internally.

Caveat worth keeping in mind: these verdicts classify the *geodesics* of
a conformally rescaled metric, not the time-parametrized trajectories
themselves.  For the radial two-body model metrics the two notions can
legitimately disagree (a repulsive force with negative energy gives
oscillatory geodesic deviation on the allowed region even though the
force linearization grows exponentially); the test suite pins one such
case as an expected difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigh

from .conformal import PotentialKind
from .curvature import _riemann_stack, christoffel, sectional
from .dynamics import FlowKind, PathRecord, _coerce

__all__ = [
    "VERDICT_STABLE",
    "VERDICT_UNSTABLE",
    "VERDICT_NEUTRAL",
    "NEUTRAL_BAND",
    "TIDAL_STEP",
    "StabilityReport",
    "JacobiEvolution",
    "stability_tensor",
    "stability_verdicts",
    "jacobi_field_evolve",
    "rotation_tensor_closed_form",
    "homothety_tensor_closed_form",
]

VERDICT_STABLE = "stable"
VERDICT_UNSTABLE = "unstable"
VERDICT_NEUTRAL = "neutral"

#: relative width of the band of eigenvalues classified as neutral
NEUTRAL_BAND = 1e-6

#: finite-difference step for the curvature behind the tidal operator; the
#: symmetry of the lowered operator is pure truncation error in the
#: Christoffel derivative, so a finer step than the general curvature
#: default pays off here (roundoff stays far below it)
TIDAL_STEP = 3e-6


# -- report ---------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    """Tidal operator at one point of a geodesic, with spectrum and checks.

    ``tensor`` is the mixed operator (first index up), ``eigenvalues``
    ascend and solve the generalized problem with the metric on the
    right, and the ``eigenvectors`` columns are metric-orthonormal.  The
    residual fields are all relative: ``symmetry_residual`` measures how
    far the metric-lowered operator is from symmetric, and
    ``zero_mode_residual`` how far S(velocity) is from zero, while
    ``kappa_area_residual`` is the worst mismatch of any eigenvalue
    against area^2 times the sectional curvature of its plane with the
    velocity (scaled by the dominant eigenvalue or the squared speed,
    whichever is larger).
    """

    coord_names: tuple[str, ...]
    point: np.ndarray
    velocity: np.ndarray
    metric: np.ndarray
    tensor: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    verdicts: tuple[str, ...]
    symmetry_residual: float
    zero_mode_residual: float
    kappa_area_residual: float


def _verdict(kappa: float, tol: float) -> str:
    if kappa > tol:
        return VERDICT_STABLE
    if kappa < -tol:
        return VERDICT_UNSTABLE
    return VERDICT_NEUTRAL


def stability_tensor(field, point, velocity, *, step: float = TIDAL_STEP) -> StabilityReport:
    """Tidal operator S(y) = R(y, v)v at a point, with spectrum and verdicts.

    Works for any metric object the curvature engine accepts.  The
    spectrum comes from the symmetric generalized eigenproblem of the
    metric-lowered operator against the metric, so eigenvectors are
    metric-orthonormal even in curvilinear charts.  Eigenvalues within
    ``NEUTRAL_BAND`` of zero -- relative to the dominant one or to the
    squared speed, whichever is larger -- are classified neutral; this
    keeps finite-difference noise on flat metrics and exact zero modes
    from flipping verdicts.
    """
    x = _coerce(point)
    v = np.asarray(velocity, dtype=float)
    r4, _, g4, _ = _riemann_stack(field, x[None, :], step)
    riem, g = r4[0], g4[0]
    vgv = float(v @ g @ v)
    if not np.isfinite(vgv) or vgv <= 0.0:
        raise ValueError("velocity must have positive length in the metric")

    tensor = np.einsum("lkij,k,j->li", riem, v, v)
    lowered = g @ tensor
    denom = max(float(np.max(np.abs(lowered))), 1e-300)
    symmetry_residual = float(np.max(np.abs(lowered - lowered.T))) / denom
    kappa, frame = eigh(0.5 * (lowered + lowered.T), g)

    scale = max(float(np.max(np.abs(kappa))), vgv)
    sv = tensor @ v
    zero_mode_residual = math.sqrt(max(float(sv @ g @ sv), 0.0)) / (math.sqrt(vgv) * scale)

    kappa_area_residual = 0.0
    for m in range(len(kappa)):
        f = frame[:, m]
        fv = float(f @ g @ v)
        area2 = vgv - fv * fv  # f is metric-unit, so |f|^2 |v|^2 - <f,v>^2
        if area2 <= 1e-9 * vgv:
            resid = abs(float(kappa[m])) / scale
        else:
            sect = sectional(field, x, f, v, g=g, riem=riem)
            resid = abs(float(kappa[m]) - area2 * sect) / scale
        kappa_area_residual = max(kappa_area_residual, resid)

    tol = NEUTRAL_BAND * scale
    verdicts = tuple(_verdict(float(k), tol) for k in kappa)
    return StabilityReport(
        coord_names=tuple(field.coord_names),
        point=x,
        velocity=v,
        metric=g,
        tensor=tensor,
        eigenvalues=kappa,
        eigenvectors=frame,
        verdicts=verdicts,
        symmetry_residual=symmetry_residual,
        zero_mode_residual=zero_mode_residual,
        kappa_area_residual=kappa_area_residual,
    )


def stability_verdicts(
    report: StabilityReport, energy: float, r: float, *, G: float = 1.0, m: float = 1.0
) -> dict[str, str]:
    """Fold the eigendirection verdicts of a report onto the chart axes.

    Each chart axis inherits the verdict of the eigendirection with the
    largest component along it; degenerate eigenvalues make that choice
    ambiguous but harmless, since tied directions share a verdict.
    ``energy`` and ``r`` anchor the neutral band to the tidal scale
    ``(G m^3 + |E| r^2) / r^4`` of the field at separation ``r``, so
    near-zero eigenvalues stay neutral even when the whole spectrum is
    small.
    """
    if r <= 0.0:
        raise ValueError("separation r must be positive")
    kappa = report.eigenvalues
    tidal = (G * m**3 + abs(energy) * r * r) / r**4
    tol = NEUTRAL_BAND * max(float(np.max(np.abs(kappa), initial=0.0)), tidal)
    out: dict[str, str] = {}
    for i, name in enumerate(report.coord_names):
        m_star = int(np.argmax(np.abs(report.eigenvectors[i, :])))
        out[name] = _verdict(float(kappa[m_star]), tol)
    return out


# -- closed forms for the rigid reference motions -------------------------------


def rotation_tensor_closed_form(omega: float) -> np.ndarray:
    """Mixed tidal operator on the uniformly rotating equilateral triangle.

    Equal masses with the 1/r attraction, circular angular rate
    ``omega``; chart order (r, eta, xi1, xi2) and velocity along the
    rotation direction omega * d/dxi1.  Radial nudges oscillate, the two
    shape directions diverge, and the rotation phase is the zero mode.
    """
    return omega * omega * np.diag([1.0, -0.5, 0.0, -0.5])


def homothety_tensor_closed_form(
    r: float,
    rdot: float,
    energy: float,
    potential: PotentialKind,
    *,
    G: float = 1.0,
    m: float = 1.0,
) -> np.ndarray:
    """Mixed tidal operator along the equal-mass equilateral scaling ray.

    Chart order (r, eta, xi1, xi2), velocity rdot * d/dr.  The operator
    is exactly quadratic in ``rdot``, so any radial speed is admissible;
    ``energy`` enters through the conformal factor and must keep the ray
    inside the allowed region (denominators vanish on its boundary).
    """
    if potential is PotentialKind.INVERSE_SQUARE:
        a = 3.0 * G * m**3
        pref = 2.0 * a * rdot * rdot / (a * r + energy * r**3) ** 2
        er2 = energy * r * r
        return pref * np.diag([0.0, -(a + 2.0 * er2), -er2, -(a + 2.0 * er2)])
    if potential is PotentialKind.NEWTONIAN:
        b = 3.0 * G * m**2.5
        pref = b * rdot * rdot / (4.0 * r * r * (b + energy * r) ** 2)
        er = energy * r
        return pref * np.diag([0.0, -(3.0 * b + 5.0 * er), -2.0 * er, -(3.0 * b + 5.0 * er)])
    raise ValueError(f"no closed form for potential {potential!r}")


# -- deviation fields along recorded geodesics ----------------------------------


@dataclass(frozen=True)
class JacobiEvolution:
    """A deviation field sampled along a geodesic.

    ``components`` holds the field in chart coordinates, and
    ``frame_components`` the same field in the parallel-transported frame
    whose columns are stored in ``frames`` (the frame starts as the
    coordinate basis at the launch point, so the two agree at lambda 0).
    """

    lam: np.ndarray
    components: np.ndarray
    frame_components: np.ndarray
    frames: np.ndarray


def jacobi_field_evolve(
    geodesic: PathRecord,
    y0,
    ydot0,
    lam_values=None,
    *,
    rtol: float = 1e-9,
    atol: float = 1e-11,
) -> JacobiEvolution:
    """Integrate the geodesic deviation equation along a recorded geodesic.

    ``y0`` and ``ydot0`` are the chart components of the initial field
    and their plain lambda-derivatives (what differencing two nearby
    geodesics gives); the covariant correction is applied internally.
    A parallel-transported frame rides along as part of the ODE state, so
    the deviation components integrate against the symmetric tidal
    operator with no connection terms.  Samples are taken at
    ``lam_values`` (default: the record's own clock nodes), which must
    stay inside the recorded clock range.
    """
    if geodesic.kind is not FlowKind.GEODESIC:
        raise ValueError("deviation fields evolve along geodesics; record one first")
    if geodesic.dense is None:
        raise ValueError("the geodesic record carries no dense interpolant")
    n = geodesic.states.shape[1]
    lam_lo = float(geodesic.clock[0])
    lam_hi = float(geodesic.clock[-1])
    if lam_hi <= lam_lo:
        raise ValueError("the geodesic record spans no clock interval")
    y0 = np.asarray(y0, dtype=float)
    yd0 = np.asarray(ydot0, dtype=float)
    if y0.shape != (n,) or yd0.shape != (n,):
        raise ValueError(f"initial field and rate must have shape ({n},)")
    if lam_values is None:
        lam_values = geodesic.clock.copy()
    lam_values = np.asarray(lam_values, dtype=float)
    if lam_values.ndim != 1 or lam_values.size == 0:
        raise ValueError("lam_values must be a nonempty 1-d array")
    if np.any(np.diff(lam_values) < 0.0):
        raise ValueError("lam_values must be nondecreasing")
    pad = 1e-12 * max(1.0, abs(lam_hi))
    if lam_values[0] < lam_lo - pad or lam_values[-1] > lam_hi + pad:
        raise ValueError("lam_values must lie inside the recorded clock range")

    fld = geodesic.field
    dense = geodesic.dense

    def rhs(lam, state):
        c = state[:n]
        cdot = state[n : 2 * n]
        frame = state[2 * n :].reshape(n, n)
        full = dense(lam)
        x, u = full[:n], full[n : 2 * n]
        r4, gam4, _, _ = _riemann_stack(fld, x[None, :], TIDAL_STEP)
        riem, gamma = r4[0], gam4[0]
        tensor = np.einsum("lkij,k,j->li", riem, u, u)
        frame_dot = -np.einsum("lab,a,bk->lk", gamma, u, frame)
        tensor_frame = np.linalg.solve(frame, tensor @ frame)
        return np.concatenate([cdot, -tensor_frame @ c, frame_dot.ravel()])

    gamma0 = christoffel(fld, geodesic.states[0])
    cdot0 = yd0 + np.einsum("lab,a,b->l", gamma0, geodesic.velocities[0], y0)
    state0 = np.concatenate([y0, cdot0, np.eye(n).ravel()])
    sol = solve_ivp(
        rhs,
        (lam_lo, lam_hi),
        state0,
        method="DOP853",
        dense_output=True,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        raise RuntimeError(f"deviation integration failed: {sol.message}")
    sampled = sol.sol(lam_values)
    frame_components = sampled[:n].T
    frames = sampled[2 * n :].T.reshape(len(lam_values), n, n)
    components = np.einsum("pij,pj->pi", frames, frame_components)
    return JacobiEvolution(
        lam=lam_values,
        components=components,
        frame_components=frame_components,
        frames=frames,
    )
