"""Jacobi-Maupertuis metric fields with analytic first derivatives.

On the classically allowed region the three-body flow at energy E is a
reparametrized geodesic flow of ``g = (E - V) x (kinetic metric)``.  In
the Hopf chart the kinetic metric of the center-of-mass space is flat, and
each quotient replaces it by the corresponding round block, so every
metric here is conformal::

    C2:  (E + F/r**p) (dr^2 + r^2 (d eta^2 + d xi1^2 - 2 cos(2 eta) d xi1 d xi2 + d xi2^2))
    R3:  (E + F/r**p) (dr^2 + r^2 (d eta^2 + sin(2 eta)^2 d xi2^2))
    S3:  F (d eta^2 + d xi1^2 - 2 cos(2 eta) d xi1 d xi2 + d xi2^2)
    S2:  F (d eta^2 + sin(2 eta)^2 d xi2^2)

with ``p = 2`` and ``F`` the scale-reduced 1/r**2 potential (arbitrary
masses), or ``p = 1`` for the Newtonian potential.  The scaling quotients
S3/S2 exist only for the scale-invariant 1/r**2 potential at E = 0, and
their metrics are round up to the conformal factor F.

``potential=None`` turns off the potential entirely and scales the bare
kinetic block by a constant; that flat/round special case is used as a
test hook throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .conformal import ConformalData, PotentialKind, shape_potential
from .coords import ChartPoint, MassConfig, Space
from .errors import InvalidQuotient, OutsideHill, ZeroSize

__all__ = [
    "PotentialKind",
    "MetricField",
    "metric_tensor",
    "kinetic_round_metric",
    "NearCollisionKind",
    "AsymptoticMetric",
    "near_collision_metric",
    "RadialConformalMetric",
    "kepler_metric",
    "oscillator_metric",
]


def _as_coords(x) -> np.ndarray:
    if isinstance(x, ChartPoint):
        return x.coords()
    return np.asarray(x, dtype=float)


class MetricField:
    """A Jacobi-Maupertuis metric on one of the four chart spaces.

    Parameters
    ----------
    space : Space
        Chart the metric lives on.
    potential : PotentialKind or None
        ``None`` gives the bare kinetic/round metric scaled by
        ``conformal_const`` (test hook).
    energy : float
        Total energy E entering the conformal factor.  Must be 0 on the
        scaling quotients S3/S2.
    masses : MassConfig
        Masses and coupling; defaults to three unit masses with G = 1.
    """

    def __init__(
        self,
        space: Space,
        potential: PotentialKind | None = PotentialKind.INVERSE_SQUARE,
        energy: float = 0.0,
        masses: MassConfig | None = None,
        conformal_const: float = 1.0,
    ):
        if masses is None:
            masses = MassConfig.equal()
        if potential is not None and space in (Space.S3, Space.S2):
            if potential is not PotentialKind.INVERSE_SQUARE:
                raise InvalidQuotient(
                    "the scaling quotient exists only for the scale-invariant 1/r**2 potential"
                )
            if energy != 0.0:
                raise InvalidQuotient("the scaling quotient requires E = 0")
        if conformal_const <= 0.0:
            raise ValueError("conformal_const must be positive")
        self.space = space
        self.potential = potential
        self.energy = float(energy)
        self.masses = masses
        self.conformal_const = float(conformal_const)

    # ------------------------------------------------------------------ basics

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def coord_names(self) -> tuple[str, ...]:
        return self.space.coord_names

    def __repr__(self):
        pot = "none" if self.potential is None else self.potential.value
        return f"MetricField({self.space.value}, potential={pot}, E={self.energy})"

    def _split(self, x):
        names = self.coord_names
        vals = dict(zip(names, x))
        return vals.get("r"), vals["eta"], vals["xi2"]

    def shape_data(self, x) -> ConformalData:
        if self.potential is None:
            raise InvalidQuotient("metric has no potential")
        _, eta, xi2 = self._split(_as_coords(x))
        return shape_potential(self.masses, self.potential, eta, xi2)

    def potential_energy(self, x) -> float:
        """Mechanical potential V at the point (negative of the attraction term)."""
        coords = _as_coords(x)
        r, _, _ = self._split(coords)
        data = self.shape_data(coords)
        if self.potential is PotentialKind.INVERSE_SQUARE:
            return -data.value / (r * r)
        return -data.value / r

    def hill_margin(self, x) -> float:
        """E - V; the metric is Riemannian where this is positive."""
        return self.energy - self.potential_energy(x)

    # ------------------------------------------------------ conformal factor

    def conformal_with_grad(self, x):
        """Conformal factor and its chart-coordinate gradient."""
        coords = _as_coords(x)
        n = self.dim
        if self.potential is None:
            return self.conformal_const, np.zeros(n)
        r, _, _ = self._split(coords)
        data = self.shape_data(coords)
        names = self.coord_names
        grad = np.zeros(n)
        if self.space in (Space.S3, Space.S2):
            c = data.value
            grad[names.index("eta")] = data.d_eta
            grad[names.index("xi2")] = data.d_xi2
        elif self.potential is PotentialKind.INVERSE_SQUARE:
            if r <= 0.0:
                raise ZeroSize("metric evaluation needs r > 0")
            inv = 1.0 / (r * r)
            c = self.energy + data.value * inv
            grad[names.index("r")] = -2.0 * data.value * inv / r
            grad[names.index("eta")] = data.d_eta * inv
            grad[names.index("xi2")] = data.d_xi2 * inv
        else:
            if r <= 0.0:
                raise ZeroSize("metric evaluation needs r > 0")
            inv = 1.0 / r
            c = self.energy + data.value * inv
            grad[names.index("r")] = -data.value * inv * inv
            grad[names.index("eta")] = data.d_eta * inv
            grad[names.index("xi2")] = data.d_xi2 * inv
        if c <= 0.0:
            raise OutsideHill(f"E - V = {c:.3e} <= 0 at {tuple(coords)}")
        return c, grad

    # -------------------------------------------------------- kinetic blocks

    def kinetic_block(self, x):
        """The mass metric (or round quotient block) and its coordinate partials."""
        coords = _as_coords(x)
        n = self.dim
        M = np.zeros((n, n))
        dM = np.zeros((n, n, n))
        if self.space is Space.C2:
            r, eta = coords[0], coords[1]
            c2e, s2e = math.cos(2.0 * eta), math.sin(2.0 * eta)
            r2 = r * r
            M[0, 0] = 1.0
            M[1, 1] = r2
            M[2, 2] = r2
            M[3, 3] = r2
            M[2, 3] = M[3, 2] = -r2 * c2e
            for i in (1, 2, 3):
                dM[i, i, 0] = 2.0 * r
            dM[2, 3, 0] = dM[3, 2, 0] = -2.0 * r * c2e
            dM[2, 3, 1] = dM[3, 2, 1] = 2.0 * r2 * s2e
        elif self.space is Space.R3:
            r, eta = coords[0], coords[1]
            s2e = math.sin(2.0 * eta)
            r2 = r * r
            M[0, 0] = 1.0
            M[1, 1] = r2
            M[2, 2] = r2 * s2e * s2e
            dM[1, 1, 0] = 2.0 * r
            dM[2, 2, 0] = 2.0 * r * s2e * s2e
            dM[2, 2, 1] = 2.0 * r2 * math.sin(4.0 * eta)
        elif self.space is Space.S3:
            eta = coords[0]
            c2e, s2e = math.cos(2.0 * eta), math.sin(2.0 * eta)
            M[0, 0] = 1.0
            M[1, 1] = 1.0
            M[2, 2] = 1.0
            M[1, 2] = M[2, 1] = -c2e
            dM[1, 2, 0] = dM[2, 1, 0] = 2.0 * s2e
        else:  # S2
            eta = coords[0]
            s2e = math.sin(2.0 * eta)
            M[0, 0] = 1.0
            M[1, 1] = s2e * s2e
            dM[1, 1, 0] = 2.0 * math.sin(4.0 * eta)
        return M, dM

    # ---------------------------------------------------------------- metric

    def metric(self, x):
        """Metric components and their coordinate partials.

        Returns ``(g, dg)`` with ``dg[i, j, k] = d g_ij / d x^k``.
        """
        coords = _as_coords(x)
        c, dc = self.conformal_with_grad(coords)
        M, dM = self.kinetic_block(coords)
        g = c * M
        dg = c * dM + np.einsum("ij,k->ijk", M, dc)
        return g, dg


def metric_tensor(field: MetricField, point) -> tuple[np.ndarray, np.ndarray]:
    """Metric components and partials of a field at a chart point."""
    return field.metric(point)


def kinetic_round_metric(space: Space, eta: float):
    """Round angular block of the kinetic metric on a scaling quotient.

    Returns ``(matrix, degenerate)`` where the flag marks the polar chart
    degeneracy at ``sin(2 eta) = 0``; the matrix is still returned there.
    """
    c2e, s2e = math.cos(2.0 * eta), math.sin(2.0 * eta)
    degenerate = abs(s2e) < 1e-12
    if space is Space.S3:
        m = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, -c2e], [0.0, -c2e, 1.0]])
    elif space is Space.S2:
        m = np.array([[1.0, 0.0], [0.0, s2e * s2e]])
    else:
        raise ValueError("round blocks exist on the scaling quotients S3/S2 only")
    return m, degenerate


# -- near-collision model metrics --------------------------------------------


class NearCollisionKind(Enum):
    """Asymptotic metric forms near binary collision rays."""

    PAIR_S2 = "pair-s2"
    PAIR_R3 = "pair-r3"
    PAIR_C2 = "pair-c2"
    PAIR_S3 = "pair-s3"
    NEWTONIAN_C2 = "newtonian-c2"
    NEWTONIAN_R3 = "newtonian-r3"


@dataclass(frozen=True)
class AsymptoticMetric:
    """Closed-form near-collision metric; satisfies the metric protocol.

    The scale-invariant pair forms use cylinder coordinates built from the
    logarithms of size and of the collision angle: ``lam`` grows toward
    the collision, ``kappa``/``chi`` are the frozen transverse angles and
    ``xim``/``xip`` the difference/sum of the rotation azimuths.  The
    Newtonian forms keep the ordinary chart coordinates.
    """

    kind: NearCollisionKind
    G: float = 1.0
    m: float = 1.0
    eta0: float = 0.5  # collision angle at lam = 0 (pair forms)

    @property
    def dim(self) -> int:
        return {
            NearCollisionKind.PAIR_S2: 2,
            NearCollisionKind.PAIR_R3: 3,
            NearCollisionKind.PAIR_C2: 4,
            NearCollisionKind.PAIR_S3: 3,
            NearCollisionKind.NEWTONIAN_C2: 4,
            NearCollisionKind.NEWTONIAN_R3: 3,
        }[self.kind]

    @property
    def coord_names(self) -> tuple[str, ...]:
        return {
            NearCollisionKind.PAIR_S2: ("lam", "chi"),
            NearCollisionKind.PAIR_R3: ("kappa", "lam", "chi"),
            NearCollisionKind.PAIR_C2: ("kappa", "lam", "xim", "xip"),
            NearCollisionKind.PAIR_S3: ("lam", "xim", "xip"),
            NearCollisionKind.NEWTONIAN_C2: ("r", "eta", "xi1", "xi2"),
            NearCollisionKind.NEWTONIAN_R3: ("r", "eta", "xi2"),
        }[self.kind]

    def _pair_amp(self, lam: float) -> float:
        """1/(2 eta^2) with eta = eta0 exp(-sqrt(2) lam)."""
        eta = self.eta0 * math.exp(-math.sqrt(2.0) * lam)
        return 0.5 / (eta * eta)

    def metric(self, x):
        coords = np.asarray(x, dtype=float)
        n = self.dim
        g = np.zeros((n, n))
        dg = np.zeros((n, n, n))
        Gm3 = self.G * self.m**3
        kind = self.kind
        if kind is NearCollisionKind.PAIR_S2:
            g[0, 0] = Gm3
            g[1, 1] = 0.5 * Gm3
        elif kind is NearCollisionKind.PAIR_R3:
            lam = coords[1]
            amp = self._pair_amp(lam)
            g[0, 0] = Gm3 * amp
            g[1, 1] = Gm3
            g[2, 2] = 0.5 * Gm3
            dg[0, 0, 1] = 2.0 * math.sqrt(2.0) * Gm3 * amp
        elif kind is NearCollisionKind.PAIR_C2:
            lam = coords[1]
            amp = self._pair_amp(lam)
            g[0, 0] = Gm3 * amp
            g[1, 1] = Gm3
            g[2, 2] = Gm3 * amp
            g[3, 3] = 0.5 * Gm3
            dg[0, 0, 1] = 2.0 * math.sqrt(2.0) * Gm3 * amp
            dg[2, 2, 1] = 2.0 * math.sqrt(2.0) * Gm3 * amp
        elif kind is NearCollisionKind.PAIR_S3:
            lam = coords[0]
            amp = self._pair_amp(lam)
            g[0, 0] = Gm3
            g[1, 1] = Gm3 * amp
            g[2, 2] = 0.5 * Gm3
            dg[1, 1, 0] = 2.0 * math.sqrt(2.0) * Gm3 * amp
        elif kind is NearCollisionKind.NEWTONIAN_C2:
            r, eta = coords[0], coords[1]
            Gm52 = self.G * self.m**2.5
            a = Gm52 / (math.sqrt(2.0) * eta * r)
            r2 = r * r
            cross = -(1.0 - 2.0 * eta * eta)
            B = np.zeros((4, 4))
            B[0, 0] = 1.0
            B[1, 1] = r2
            B[2, 2] = r2
            B[3, 3] = r2
            B[2, 3] = B[3, 2] = cross * r2
            dB_r = np.zeros((4, 4))
            dB_r[1, 1] = dB_r[2, 2] = dB_r[3, 3] = 2.0 * r
            dB_r[2, 3] = dB_r[3, 2] = 2.0 * r * cross
            dB_eta = np.zeros((4, 4))
            dB_eta[2, 3] = dB_eta[3, 2] = 4.0 * eta * r2
            g = a * B
            dg[:, :, 0] = (-a / r) * B + a * dB_r
            dg[:, :, 1] = (-a / eta) * B + a * dB_eta
            return g, dg
        else:  # NEWTONIAN_R3
            r, eta = coords[0], coords[1]
            Gm52 = self.G * self.m**2.5
            a = (Gm52 / r) * (1.0 / (math.sqrt(2.0) * eta) + 2.0 * math.sqrt(2.0 / 3.0))
            da_r = -a / r
            da_eta = -(Gm52 / r) / (math.sqrt(2.0) * eta * eta)
            r2 = r * r
            B = np.diag([1.0, r2, 4.0 * eta * eta * r2])
            dB_r = np.diag([0.0, 2.0 * r, 8.0 * eta * eta * r])
            dB_eta = np.diag([0.0, 0.0, 8.0 * eta * r2])
            g = a * B
            dg[:, :, 0] = da_r * B + a * dB_r
            dg[:, :, 1] = da_eta * B + a * dB_eta
            return g, dg
        return g, dg


def near_collision_metric(kind: NearCollisionKind, G: float = 1.0, m: float = 1.0, eta0: float = 0.5) -> AsymptoticMetric:
    """Asymptotic metric model valid near a binary collision ray."""
    return AsymptoticMetric(kind, G=G, m=m, eta0=eta0)


# -- two-degree-of-freedom test metrics ---------------------------------------


class RadialConformalMetric:
    """2D metric ``f(r) (dr^2 + r^2 d theta^2)``; curvature test bed."""

    dim = 2
    coord_names = ("r", "theta")

    def __init__(self, f, fprime):
        self._f = f
        self._fp = fprime

    def metric(self, x):
        r = float(np.asarray(x, dtype=float)[0])
        if r <= 0.0:
            raise ZeroSize("radial chart needs r > 0")
        f = self._f(r)
        if f <= 0.0:
            raise OutsideHill("conformal factor nonpositive")
        fp = self._fp(r)
        g = np.diag([f, f * r * r])
        dg = np.zeros((2, 2, 2))
        dg[0, 0, 0] = fp
        dg[1, 1, 0] = fp * r * r + 2.0 * f * r
        return g, dg


def kepler_metric(energy: float, k: float = 1.0, m: float = 1.0) -> RadialConformalMetric:
    """Jacobi-Maupertuis metric of the planar Kepler problem."""
    return RadialConformalMetric(
        lambda r: m * (energy + k / r),
        lambda r: -m * k / (r * r),
    )


def oscillator_metric(energy: float, k: float = 1.0) -> RadialConformalMetric:
    """Jacobi-Maupertuis metric of the planar isotropic oscillator (unit mass)."""
    return RadialConformalMetric(
        lambda r: energy - 0.5 * k * r * r,
        lambda r: -k * r,
    )
