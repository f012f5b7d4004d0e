"""Scale-reduced pair potentials and their analytic partial derivatives.

Every pairwise squared separation, divided by the squared configuration
size ``r**2``, is a trigonometric polynomial of the shape angles::

    d_ij**2 / r**2 = p + q cos(2 eta) + w sin(2 eta) cos(2 xi2)

with constant coefficients fixed by the masses.  Both potentials are sums
of powers of these three quantities, so one small kernel yields values and
first/second partials for the 1/r**2 potential (``r**2 * U`` is a function
of the angles alone) and for the Newtonian potential (``r * U``).

For equal masses the 1/r**2 sum reduces to ``G m**3 h(eta, xi2)`` with the
dimensionless ``h = v1 + v2 + v3``; the Newtonian sum reduces to
``G m**(5/2) U`` with ``U = sqrt(v1) + sqrt(v2) + sqrt(v3)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .coords import MassConfig
from .errors import ChartSingular, CollisionPole

__all__ = [
    "PotentialKind",
    "PairChannel",
    "pair_channels",
    "separations_sq",
    "ConformalData",
    "shape_potential",
    "conformal_v",
    "conformal_h",
    "htilde",
    "newtonian_U",
    "round_grad_sq",
    "round_laplacian",
    "v_grid",
    "h_grid",
    "u_grid",
]

#: squared-separation floor (relative to r**2) below which a pair counts as collided
COLLISION_SQ_TOL = 1e-14


class PotentialKind(Enum):
    INVERSE_SQUARE = "inverse-square"
    NEWTONIAN = "newtonian"


@dataclass(frozen=True)
class PairChannel:
    """One interacting pair: its coupling and separation coefficients."""

    bodies: tuple[int, int]
    coupling: float  # G m_i m_j
    p: float
    q: float
    w: float

    def separation_sq(self, eta: float, xi2: float) -> float:
        """d_ij**2 / r**2 at the given shape angles."""
        return (
            self.p
            + self.q * math.cos(2.0 * eta)
            + self.w * math.sin(2.0 * eta) * math.cos(2.0 * xi2)
        )


def pair_channels(masses: MassConfig) -> tuple[PairChannel, PairChannel, PairChannel]:
    """The three pair channels of a mass configuration."""
    G = masses.G
    M1, M2 = masses.M1, masses.M2
    mu1, mu2 = masses.mu1, masses.mu2
    root = 1.0 / math.sqrt(M1 * M2)
    # pair (1, 2): separation^2 / r^2 = sin(eta)^2 / M1
    ch12 = PairChannel((1, 2), G * masses.m1 * masses.m2, 0.5 / M1, -0.5 / M1, 0.0)
    # pair (2, 3): |cos(eta) - mu1 sqrt(M2/M1) e^{2 i xi2} sin(eta)|^2 / M2
    a, b = 1.0 / M2, mu1 * mu1 / M1
    ch23 = PairChannel((2, 3), G * masses.m2 * masses.m3, 0.5 * (a + b), 0.5 * (a - b), -mu1 * root)
    # pair (3, 1): |cos(eta) + mu2 sqrt(M2/M1) e^{2 i xi2} sin(eta)|^2 / M2
    a, b = 1.0 / M2, mu2 * mu2 / M1
    ch31 = PairChannel((3, 1), G * masses.m3 * masses.m1, 0.5 * (a + b), 0.5 * (a - b), mu2 * root)
    return ch12, ch23, ch31


def separations_sq(masses: MassConfig, eta: float, xi2: float) -> tuple[float, float, float]:
    """Pairwise squared separations divided by r**2, ordered (12, 23, 31)."""
    return tuple(ch.separation_sq(eta, xi2) for ch in pair_channels(masses))


@dataclass(frozen=True)
class ConformalData:
    """Value and partials of a scale-reduced potential at a shape point.

    ``value`` is ``r**2 * U`` for the 1/r**2 potential and ``r * U`` for
    the Newtonian one (a function of the shape angles only); for equal
    masses with ``G = m = 1`` it equals the dimensionless ``h`` or ``U``.
    """

    kind: PotentialKind
    eta: float
    xi2: float
    value: float
    d_eta: float
    d_xi2: float
    d_eta2: float
    d_xi22: float
    d_etaxi2: float
    vs: tuple[float, float, float] | None = None

    @property
    def grad_sq(self) -> float:
        """Squared gradient w.r.t. the round radius-1/2 sphere metric."""
        return round_grad_sq(self)

    @property
    def laplacian(self) -> float:
        """Laplacian w.r.t. the round radius-1/2 sphere metric."""
        return round_laplacian(self)


def _channel_partials(ch: PairChannel, eta: float, xi2: float):
    """den = d^2/r^2 and its partials up to second order."""
    c2e = math.cos(2.0 * eta)
    s2e = math.sin(2.0 * eta)
    c2x = math.cos(2.0 * xi2)
    s2x = math.sin(2.0 * xi2)
    den = ch.p + ch.q * c2e + ch.w * s2e * c2x
    d_e = -2.0 * ch.q * s2e + 2.0 * ch.w * c2e * c2x
    d_x = -2.0 * ch.w * s2e * s2x
    d_ee = -4.0 * ch.q * c2e - 4.0 * ch.w * s2e * c2x
    d_xx = -4.0 * ch.w * s2e * c2x
    d_ex = -4.0 * ch.w * c2e * s2x
    return den, d_e, d_x, d_ee, d_xx, d_ex


def shape_potential(
    masses: MassConfig,
    kind: PotentialKind,
    eta: float,
    xi2: float,
    collision_tol: float = COLLISION_SQ_TOL,
) -> ConformalData:
    """Scale-reduced potential of a mass configuration with full partials.

    Raises
    ------
    CollisionPole
        When a pairwise squared separation falls below ``collision_tol * r**2``.
    """
    value = d_e = d_x = d_ee = d_xx = d_ex = 0.0
    for ch in pair_channels(masses):
        den, e1, x1, e2, x2, ex = _channel_partials(ch, eta, xi2)
        if den < collision_tol:
            raise CollisionPole(ch.bodies)
        if kind is PotentialKind.INVERSE_SQUARE:
            inv = 1.0 / den
            f = ch.coupling * inv
            f_d = -f * inv  # d/d(den) of coupling/den
            f_dd = 2.0 * f * inv * inv
        else:
            inv = 1.0 / den
            f = ch.coupling / math.sqrt(den)
            f_d = -0.5 * f * inv
            f_dd = 0.75 * f * inv * inv
        value += f
        d_e += f_d * e1
        d_x += f_d * x1
        d_ee += f_dd * e1 * e1 + f_d * e2
        d_xx += f_dd * x1 * x1 + f_d * x2
        d_ex += f_dd * e1 * x1 + f_d * ex
    return ConformalData(kind, eta, xi2, value, d_e, d_x, d_ee, d_xx, d_ex)


def conformal_v(eta: float, xi2: float) -> tuple[float, float, float]:
    """Equal-mass pair terms (v1, v2, v3) of the dimensionless h.

    ``v_i`` is inversely proportional to the squared separation of the
    pair not containing body i; each satisfies ``v_i >= 1/2`` and they are
    constrained by ``1/v1 + 1/v2 + 1/v3 = 3``.
    """
    root3 = math.sqrt(3.0)
    c2e = math.cos(2.0 * eta)
    s2e = math.sin(2.0 * eta)
    c2x = math.cos(2.0 * xi2)
    q1 = 2.0 + c2e - root3 * s2e * c2x
    q2 = 2.0 + c2e + root3 * s2e * c2x
    q3 = 2.0 - 2.0 * c2e
    # each q_i/2 is the squared separation of the opposite pair over r**2 (m = 1)
    for q, pair in ((q1, (2, 3)), (q2, (3, 1)), (q3, (1, 2))):
        if q < 2.0 * COLLISION_SQ_TOL:
            raise CollisionPole(pair)
    return 2.0 / q1, 2.0 / q2, 2.0 / q3


def conformal_h(eta: float, xi2: float) -> ConformalData:
    """Dimensionless conformal factor h of the equal-mass 1/r**2 potential."""
    data = shape_potential(MassConfig.equal(), PotentialKind.INVERSE_SQUARE, eta, xi2)
    return ConformalData(
        data.kind,
        eta,
        xi2,
        data.value,
        data.d_eta,
        data.d_xi2,
        data.d_eta2,
        data.d_xi22,
        data.d_etaxi2,
        vs=conformal_v(eta, xi2),
    )


def htilde(eta: float, xi2: float, masses: MassConfig) -> float:
    """Scale-reduced 1/r**2 potential for arbitrary masses (includes G).

    Reduces to ``G m**3 h`` for equal masses, and is bounded below by
    ``G m1 m2 M1`` everywhere.
    """
    return shape_potential(masses, PotentialKind.INVERSE_SQUARE, eta, xi2).value


def newtonian_U(eta: float, xi2: float) -> ConformalData:
    """Dimensionless Newtonian conformal factor U of equal masses."""
    return shape_potential(MassConfig.equal(), PotentialKind.NEWTONIAN, eta, xi2)


def round_grad_sq(data: ConformalData) -> float:
    """|grad f|^2 w.r.t. the round radius-1/2 metric d eta^2 + sin(2 eta)^2 d xi2^2."""
    s = math.sin(2.0 * data.eta)
    if abs(s) < 1e-12:
        raise ChartSingular("round gradient undefined where sin(2 eta) = 0")
    return data.d_eta**2 + (data.d_xi2 / s) ** 2


def round_laplacian(data: ConformalData) -> float:
    """Laplace-Beltrami of f w.r.t. the round radius-1/2 metric."""
    s = math.sin(2.0 * data.eta)
    if abs(s) < 1e-12:
        raise ChartSingular("round Laplacian undefined where sin(2 eta) = 0")
    return data.d_eta2 + 2.0 * (math.cos(2.0 * data.eta) / s) * data.d_eta + data.d_xi22 / (s * s)


# -- vectorized equal-mass stacks for grid scans ------------------------------

_Q_COEFFS = ((1.0, -math.sqrt(3.0)), (1.0, math.sqrt(3.0)), (-2.0, 0.0))


def _q_stacks(eta, xi2):
    """Denominators q_i = 2 + a cos2eta + b sin2eta cos2xi2 with partials, vectorized."""
    eta = np.asarray(eta, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    c2e, s2e = np.cos(2.0 * eta), np.sin(2.0 * eta)
    c2x, s2x = np.cos(2.0 * xi2), np.sin(2.0 * xi2)
    out = []
    for a, b in _Q_COEFFS:
        q = 2.0 + a * c2e + b * s2e * c2x
        q_e = -2.0 * a * s2e + 2.0 * b * c2e * c2x
        q_x = -2.0 * b * s2e * s2x
        q_ee = -4.0 * a * c2e - 4.0 * b * s2e * c2x
        q_xx = -4.0 * b * s2e * c2x
        q_ex = -4.0 * b * c2e * s2x
        out.append((q, q_e, q_x, q_ee, q_xx, q_ex))
    return out


def v_grid(eta, xi2):
    """Vectorized (v1, v2, v3)."""
    return tuple(2.0 / q[0] for q in _q_stacks(eta, xi2))


def _sum_reciprocal(stacks, power: float):
    """Sum of c * q**(-power) with partials; c = 2 for power 1, sqrt(2) for 1/2."""
    coeff = 2.0 if power == 1.0 else math.sqrt(2.0)
    tot = {k: 0.0 for k in ("value", "e", "x", "ee", "xx", "ex")}
    for q, q_e, q_x, q_ee, q_xx, q_ex in stacks:
        f = coeff * q ** (-power)
        f_d = -power * f / q
        f_dd = power * (power + 1.0) * f / (q * q)
        tot["value"] = tot["value"] + f
        tot["e"] = tot["e"] + f_d * q_e
        tot["x"] = tot["x"] + f_d * q_x
        tot["ee"] = tot["ee"] + f_dd * q_e * q_e + f_d * q_ee
        tot["xx"] = tot["xx"] + f_dd * q_x * q_x + f_d * q_xx
        tot["ex"] = tot["ex"] + f_dd * q_e * q_x + f_d * q_ex
    return tot


def _with_round_operators(tot, eta):
    s = np.sin(2.0 * np.asarray(eta, dtype=float))
    c = np.cos(2.0 * np.asarray(eta, dtype=float))
    tot["grad_sq"] = tot["e"] ** 2 + (tot["x"] / s) ** 2
    tot["laplacian"] = tot["ee"] + 2.0 * (c / s) * tot["e"] + tot["xx"] / (s * s)
    return tot


def h_grid(eta, xi2) -> dict:
    """Vectorized h with partials, round gradient-square and Laplacian."""
    return _with_round_operators(_sum_reciprocal(_q_stacks(eta, xi2), 1.0), eta)


def u_grid(eta, xi2) -> dict:
    """Vectorized Newtonian U with partials and round operators."""
    return _with_round_operators(_sum_reciprocal(_q_stacks(eta, xi2), 0.5), eta)
