"""Coordinate charts for the planar three-body problem.

Positions of the three bodies are complex numbers.  Quotienting by
translations gives the center-of-mass configuration space ``C2``,
coordinatized by two mass-rescaled Jacobi vectors ``(z1, z2)``.  Further
quotients by the rotation and (for the scale-invariant potential at zero
energy) scaling symmetries give shape space ``R3``, the round three-sphere
``S3`` and the shape sphere ``S2``.

The chart used throughout is of Hopf type::

    z1 = r exp(i (xi1 + xi2)) sin(eta)
    z2 = r exp(i (xi1 - xi2)) cos(eta)

with ``r >= 0``, ``0 <= eta <= pi/2``, ``-pi <= xi2 <= pi`` and
``|xi2| <= xi1 <= 2 pi - |xi2|``.  ``xi1`` rotates the whole triangle,
``2 xi2`` is the azimuth on the shape sphere, and ``2 eta`` measured from
the ``eta = 0`` pole is the polar angle.  On quotients where an angle has
been divided out the corresponding field is absent.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from .errors import ChartSingular, ZeroSize

__all__ = [
    "MassConfig",
    "Space",
    "ChartPoint",
    "PlanarConfig",
    "jacobi_from_positions",
    "positions_from_jacobi",
    "rescaled_from_jacobi",
    "jacobi_from_rescaled",
    "hopf_from_rescaled",
    "rescaled_from_hopf",
    "shape_cartesian",
    "theta_phi_from_hopf",
    "special_point",
    "SPECIAL_POINT_LABELS",
    "is_collinear_angles",
    "quotient_xi2",
    "zdot_from_hopf",
    "hopf_velocity_from_zdot",
    "permute_bodies",
    "permute_masses",
    "relabel_rescaled",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MassConfig:
    """Masses of the three bodies plus the gravitational coupling."""

    m1: float = 1.0
    m2: float = 1.0
    m3: float = 1.0
    G: float = 1.0

    def __post_init__(self):
        if min(self.m1, self.m2, self.m3) <= 0.0:
            raise ValueError("masses must be strictly positive")
        if self.G <= 0.0:
            raise ValueError("coupling G must be strictly positive")

    @classmethod
    def equal(cls, m: float = 1.0, G: float = 1.0) -> "MassConfig":
        return cls(m, m, m, G)

    @property
    def M1(self) -> float:
        """Reduced mass of the (1, 2) pair."""
        return self.m1 * self.m2 / (self.m1 + self.m2)

    @property
    def M2(self) -> float:
        """Reduced mass of body 3 against the (1, 2) pair."""
        pair = self.m1 + self.m2
        return self.m3 * pair / (self.m3 + pair)

    @property
    def M3(self) -> float:
        """Total mass."""
        return self.m1 + self.m2 + self.m3

    @property
    def mu1(self) -> float:
        return self.m1 / (self.m1 + self.m2)

    @property
    def mu2(self) -> float:
        return self.m2 / (self.m1 + self.m2)

    @property
    def is_equal(self) -> bool:
        return self.m1 == self.m2 == self.m3


class Space(Enum):
    """Configuration space or one of its symmetry quotients."""

    C2 = "C2"
    R3 = "R3"
    S3 = "S3"
    S2 = "S2"

    @property
    def dim(self) -> int:
        return {"C2": 4, "R3": 3, "S3": 3, "S2": 2}[self.value]

    @property
    def coord_names(self) -> tuple[str, ...]:
        return {
            "C2": ("r", "eta", "xi1", "xi2"),
            "R3": ("r", "eta", "xi2"),
            "S3": ("eta", "xi1", "xi2"),
            "S2": ("eta", "xi2"),
        }[self.value]

    @property
    def has_radius(self) -> bool:
        return self in (Space.C2, Space.R3)

    @property
    def has_rotation(self) -> bool:
        return self in (Space.C2, Space.S3)


_ETA_TOL = 1e-12


@dataclass(frozen=True)
class ChartPoint:
    """A point of one of the four spaces in the Hopf-type chart.

    Fields that the space has quotiented away are ``None``.  Angles are
    stored as given; use :func:`quotient_xi2` to push a signed ``xi2`` to
    the ``[0, pi]`` range of the rotation-reduced charts.
    """

    space: Space
    eta: float
    xi2: float
    r: float | None = None
    xi1: float | None = None

    def __post_init__(self):
        if self.space.has_radius:
            if self.r is None:
                raise ValueError(f"{self.space.value} needs a radius")
            if self.r < 0.0:
                raise ValueError("size coordinate r must be nonnegative")
        elif self.r is not None:
            raise ValueError(f"{self.space.value} has no radius coordinate")
        if self.space.has_rotation:
            if self.xi1 is None:
                raise ValueError(f"{self.space.value} needs xi1")
        elif self.xi1 is not None:
            raise ValueError(f"{self.space.value} has no xi1 coordinate")
        if not (-_ETA_TOL <= self.eta <= math.pi / 2.0 + _ETA_TOL):
            raise ValueError("eta must lie in [0, pi/2]")

    @classmethod
    def c2(cls, r, eta, xi1, xi2):
        return cls(Space.C2, eta, xi2, r=r, xi1=xi1)

    @classmethod
    def r3(cls, r, eta, xi2):
        return cls(Space.R3, eta, xi2, r=r)

    @classmethod
    def s3(cls, eta, xi1, xi2):
        return cls(Space.S3, eta, xi2, xi1=xi1)

    @classmethod
    def s2(cls, eta, xi2):
        return cls(Space.S2, eta, xi2)

    def coords(self) -> np.ndarray:
        """Coordinate array in the chart order of the space."""
        vals = {"r": self.r, "eta": self.eta, "xi1": self.xi1, "xi2": self.xi2}
        return np.array([vals[name] for name in self.space.coord_names], dtype=float)

    @classmethod
    def from_coords(cls, space: Space, x) -> "ChartPoint":
        vals = dict(zip(space.coord_names, np.asarray(x, dtype=float)))
        return cls(space, vals["eta"], vals["xi2"], r=vals.get("r"), xi1=vals.get("xi1"))


@dataclass(frozen=True)
class PlanarConfig:
    """Three labelled positions on the complex plane."""

    x1: complex
    x2: complex
    x3: complex

    @property
    def positions(self) -> tuple[complex, complex, complex]:
        return (self.x1, self.x2, self.x3)

    def centered(self, masses: MassConfig) -> "PlanarConfig":
        """The same configuration translated to its center of mass."""
        cm = (masses.m1 * self.x1 + masses.m2 * self.x2 + masses.m3 * self.x3) / masses.M3
        return PlanarConfig(self.x1 - cm, self.x2 - cm, self.x3 - cm)

    def jacobi(self, masses: MassConfig):
        return jacobi_from_positions(self, masses)

    def rescaled(self, masses: MassConfig):
        J1, J2, _ = jacobi_from_positions(self, masses)
        return rescaled_from_jacobi(J1, J2, masses)

    def separations(self) -> tuple[float, float, float]:
        """Pairwise distances ordered as (|x1-x2|, |x2-x3|, |x3-x1|)."""
        return (
            abs(self.x1 - self.x2),
            abs(self.x2 - self.x3),
            abs(self.x3 - self.x1),
        )

    def moment_of_inertia(self, masses: MassConfig) -> float:
        """Center-of-mass moment of inertia; equals r**2 in the chart."""
        c = self.centered(masses)
        return (
            masses.m1 * abs(c.x1) ** 2
            + masses.m2 * abs(c.x2) ** 2
            + masses.m3 * abs(c.x3) ** 2
        )


def jacobi_from_positions(config: PlanarConfig, masses: MassConfig):
    """Jacobi vectors (J1, J2, J3) of a configuration.

    J1 joins body 1 to body 2, J2 joins the (1, 2) barycenter to body 3,
    and J3 is the center of mass.
    """
    x1, x2, x3 = config.positions
    pair = masses.m1 + masses.m2
    J1 = x2 - x1
    J2 = x3 - (masses.m1 * x1 + masses.m2 * x2) / pair
    J3 = (masses.m1 * x1 + masses.m2 * x2 + masses.m3 * x3) / masses.M3
    return J1, J2, J3


def positions_from_jacobi(J1: complex, J2: complex, J3: complex, masses: MassConfig) -> PlanarConfig:
    """Inverse of :func:`jacobi_from_positions`."""
    pair = masses.m1 + masses.m2
    barycenter12 = J3 - (masses.m3 / masses.M3) * J2
    x1 = barycenter12 - masses.mu2 * J1
    x2 = barycenter12 + masses.mu1 * J1
    x3 = J3 + (pair / masses.M3) * J2
    return PlanarConfig(x1, x2, x3)


def rescaled_from_jacobi(J1: complex, J2: complex, masses: MassConfig):
    """Rescale Jacobi vectors so the kinetic metric becomes Euclidean."""
    return math.sqrt(masses.M1) * J1, math.sqrt(masses.M2) * J2


def jacobi_from_rescaled(z1: complex, z2: complex, masses: MassConfig):
    return z1 / math.sqrt(masses.M1), z2 / math.sqrt(masses.M2)


def _in_xi_ranges(xi1: float, xi2: float, tol: float = 1e-9) -> bool:
    return (
        -math.pi - tol <= xi2 <= math.pi + tol
        and abs(xi2) - tol <= xi1 <= TWO_PI - abs(xi2) + tol
    )


def hopf_from_rescaled(z1: complex, z2: complex) -> ChartPoint:
    """Hopf chart point of a rescaled-Jacobi pair.

    Raises
    ------
    ZeroSize
        If both vectors vanish (triple collision).
    """
    r = math.hypot(abs(z1), abs(z2))
    if r == 0.0:
        raise ZeroSize("triple collision: both rescaled Jacobi vectors vanish")
    eta = math.atan2(abs(z1), abs(z2))
    if abs(z1) == 0.0:
        xi1 = cmath.phase(z2) % TWO_PI
        return ChartPoint.c2(r, 0.0, xi1, 0.0)
    if abs(z2) == 0.0:
        xi1 = cmath.phase(z1) % TWO_PI
        return ChartPoint.c2(r, math.pi / 2.0, xi1, 0.0)
    a1 = cmath.phase(z1)
    a2 = cmath.phase(z2)
    # The phase pair is only defined modulo 2 pi each; pick the branch that
    # lands in the fundamental ranges of the chart.
    for k1 in (0, 1):
        for k2 in (0, 1):
            xi1 = 0.5 * (a1 + a2) + math.pi * (k1 + k2)
            xi2 = 0.5 * (a1 - a2) + math.pi * (k1 - k2)
            if _in_xi_ranges(xi1, xi2):
                return ChartPoint.c2(r, eta, xi1, xi2)
    raise AssertionError("phase branch selection failed")  # pragma: no cover


def rescaled_from_hopf(point: ChartPoint) -> tuple[complex, complex]:
    """Rescaled Jacobi vectors of a C2 (or lifted S3) chart point."""
    if point.space not in (Space.C2, Space.S3):
        raise ValueError("only C2/S3 points carry enough angles to lift")
    r = 1.0 if point.r is None else point.r
    z1 = r * cmath.exp(1j * (point.xi1 + point.xi2)) * math.sin(point.eta)
    z2 = r * cmath.exp(1j * (point.xi1 - point.xi2)) * math.cos(point.eta)
    return z1, z2


def quotient_xi2(xi2: float) -> float:
    """Push a signed azimuth to the [0, pi] range of the rotation-reduced charts."""
    return xi2 if xi2 >= 0.0 else xi2 + math.pi


def shape_cartesian(point: ChartPoint) -> np.ndarray:
    """Cartesian coordinates (w1, w2, w3) of the shape-sphere image.

    The image lies on the sphere of radius ``r**2 / 2``; for points without
    a radius the unit size ``r = 1`` is used.
    """
    r = 1.0 if point.r is None else point.r
    rr = 0.5 * r * r
    two_eta = 2.0 * point.eta
    two_xi2 = 2.0 * point.xi2
    return np.array(
        [
            rr * math.sin(two_eta) * math.cos(two_xi2),
            rr * math.sin(two_eta) * math.sin(two_xi2),
            rr * math.cos(two_eta),
        ]
    )


def theta_phi_from_hopf(eta: float, xi2: float) -> tuple[float, float]:
    """Latitude/longitude chart (theta, phi) on the shape sphere.

    The equator ``phi = 0`` holds the collinear shapes; the poles are the
    two equilateral shapes.

    Raises
    ------
    ChartSingular
        At the poles, where ``theta`` is undefined; the latitude is
        attached to the exception as ``phi``.
    """
    sin_phi = math.sin(2.0 * eta) * math.sin(2.0 * xi2)
    sin_phi = max(-1.0, min(1.0, sin_phi))
    phi = math.asin(sin_phi)
    x = math.sin(2.0 * eta) * math.cos(2.0 * xi2)
    y = -math.cos(2.0 * eta)
    if math.hypot(x, y) < 1e-13:
        raise ChartSingular("theta undefined at an equilateral pole", phi=phi)
    theta = math.atan2(x, y)
    return theta, phi


def is_collinear_angles(eta: float, xi2: float, tol: float = 1e-9) -> bool:
    """True when the shape lies on the collinear (syzygy) great circle."""
    if min(abs(eta), abs(eta - math.pi / 2.0)) <= tol:
        return True
    # Collinear shapes sit on the meridians 2 xi2 = 0 mod pi.
    return abs(math.sin(2.0 * xi2)) <= tol


SPECIAL_POINT_LABELS = ("L4", "L5", "E1", "E2", "E3", "C1", "C2", "C3")


def _euler_eta() -> float:
    """Shape-sphere latitude of the non-polar Euler configurations.

    The floor value 1/2 of the relevant pair term is a double root of the
    level condition, so the point is located as the bracketed simple root
    of the eta-derivative of that term's denominator.
    """

    def slope(eta):
        return -2.0 * math.sin(2.0 * eta) + 2.0 * math.sqrt(3.0) * math.cos(2.0 * eta)

    return brentq(slope, 0.05, math.pi / 2.0 - 0.05, xtol=1e-14)


def special_point(label: str, space: Space = Space.S2, r: float = 1.0) -> ChartPoint:
    """Named equal-mass configurations on the shape sphere.

    ``L4``/``L5`` are the two equilateral shapes, ``E1``..``E3`` the Euler
    central configurations (body i between the other two) and ``C1``..``C3``
    the two-body collision directions (bodies j, k colliding).  On charts
    that keep a signed azimuth (C2, S3) ``L5`` is returned with
    ``xi2 = -pi/4``; on R3/S2 the azimuth is folded to ``[0, pi]``.
    """
    label = label.upper()
    if label == "L4":
        eta, xi2 = math.pi / 4.0, math.pi / 4.0
    elif label == "L5":
        eta, xi2 = math.pi / 4.0, -math.pi / 4.0
    elif label == "E1":
        eta, xi2 = _euler_eta(), math.pi / 2.0
    elif label == "E2":
        eta, xi2 = _euler_eta(), 0.0
    elif label == "E3":
        eta, xi2 = math.pi / 2.0, 0.0
    elif label == "C1":
        eta, xi2 = math.pi / 3.0, 0.0
    elif label == "C2":
        eta, xi2 = math.pi / 3.0, math.pi / 2.0
    elif label == "C3":
        eta, xi2 = 0.0, 0.0
    else:
        raise ValueError(f"unknown special point {label!r}")
    if space in (Space.R3, Space.S2):
        xi2 = quotient_xi2(xi2)
    if space is Space.C2:
        return ChartPoint.c2(r, eta, math.pi / 4.0 if label in ("L4", "L5") else 0.5, xi2)
    if space is Space.R3:
        return ChartPoint.r3(r, eta, xi2)
    if space is Space.S3:
        return ChartPoint.s3(eta, math.pi / 4.0 if label in ("L4", "L5") else 0.5, xi2)
    return ChartPoint.s2(eta, xi2)


# -- velocity maps between the Hopf chart and the flat z-chart ----------------


def zdot_from_hopf(x, v) -> tuple[complex, complex]:
    """Push a C2 chart velocity forward to the flat (z1, z2) chart."""
    r, eta, xi1, xi2 = (float(c) for c in x)
    vr, veta, vxi1, vxi2 = (float(c) for c in v)
    e1 = cmath.exp(1j * (xi1 + xi2))
    e2 = cmath.exp(1j * (xi1 - xi2))
    s, c = math.sin(eta), math.cos(eta)
    z1 = r * e1 * s
    z2 = r * e2 * c
    zd1 = e1 * (vr * s + r * c * veta) + 1j * z1 * (vxi1 + vxi2)
    zd2 = e2 * (vr * c - r * s * veta) + 1j * z2 * (vxi1 - vxi2)
    return zd1, zd2


def _hopf_jacobian(x) -> np.ndarray:
    """Real 4x4 Jacobian of (Re z1, Im z1, Re z2, Im z2) w.r.t. (r, eta, xi1, xi2)."""
    r, eta, xi1, xi2 = (float(c) for c in x)
    e1 = cmath.exp(1j * (xi1 + xi2))
    e2 = cmath.exp(1j * (xi1 - xi2))
    s, c = math.sin(eta), math.cos(eta)
    z1 = r * e1 * s
    z2 = r * e2 * c
    cols = [
        (e1 * s, e2 * c),
        (r * e1 * c, -r * e2 * s),
        (1j * z1, 1j * z2),
        (1j * z1, -1j * z2),
    ]
    J = np.empty((4, 4))
    for j, (dz1, dz2) in enumerate(cols):
        J[:, j] = (dz1.real, dz1.imag, dz2.real, dz2.imag)
    return J


def hopf_velocity_from_zdot(x, zd1: complex, zd2: complex) -> np.ndarray:
    """Pull a flat-chart velocity back to the C2 Hopf chart at the point x."""
    rhs = np.array([zd1.real, zd1.imag, zd2.real, zd2.imag])
    return np.linalg.solve(_hopf_jacobian(x), rhs)


# -- body relabelling ---------------------------------------------------------


def permute_bodies(config: PlanarConfig, perm: tuple[int, int, int]) -> PlanarConfig:
    """Relabelled configuration: new body k is old body perm[k-1] (1-based)."""
    xs = config.positions
    return PlanarConfig(*(xs[i - 1] for i in perm))


def permute_masses(masses: MassConfig, perm: tuple[int, int, int]) -> MassConfig:
    ms = (masses.m1, masses.m2, masses.m3)
    return MassConfig(*(ms[i - 1] for i in perm), G=masses.G)


def relabel_rescaled(z1: complex, z2: complex, masses: MassConfig, perm: tuple[int, int, int]):
    """Rescaled Jacobi pair of the same physical configuration after relabelling.

    Works for arbitrary masses by passing through center-of-mass positions.
    Returns ``(z1', z2', masses')``.
    """
    J1, J2 = jacobi_from_rescaled(z1, z2, masses)
    config = positions_from_jacobi(J1, J2, 0.0, masses)
    new_masses = permute_masses(masses, perm)
    new_config = permute_bodies(config, perm)
    J1n, J2n, _ = jacobi_from_positions(new_config, new_masses)
    z1n, z2n = rescaled_from_jacobi(J1n, J2n, new_masses)
    return z1n, z2n, new_masses
