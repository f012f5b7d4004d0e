"""Curvature engine plus closed-form curvature formulas and limit tables.

The numeric path works for any object exposing ``dim``, ``coord_names``
and ``metric(x) -> (g, dg)`` with analytic first derivatives ``dg``:
Christoffel symbols come from ``(g, dg)`` algebraically, the Riemann
tensor differentiates the Christoffel symbols by central differences, and
everything downstream (Ricci, scalar, sectional curvatures, stability
tensors, deviation equations) contracts that tensor.

Index conventions used throughout::

    dg[i, j, k]       = d g_ij / d x^k
    gamma[l, i, j]    = Christoffel  l over (i, j)
    riem[l, k, i, j]  = component of R(e_i, e_j) e_k along e_l
    ricci[k, j]       = sum_l riem[l, k, l, j]

The closed-form scalar curvatures are expressed through the scale-reduced
potential and its round-sphere gradient/Laplacian, so they apply to equal
and unequal masses alike; the factored shape-sphere form makes the sign
of the shape-sphere scalar curvature exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .conformal import (
    ConformalData,
    PotentialKind,
    h_grid,
    round_grad_sq,
    round_laplacian,
    shape_potential,
    u_grid,
)
from .coords import MassConfig, Space, special_point
from .errors import ChartSingular, DegeneratePlane, InvalidQuotient
from .metrics import MetricField, NearCollisionKind, near_collision_metric

__all__ = [
    "christoffel",
    "riemann",
    "ricci",
    "scalar_curvature",
    "sectional",
    "biquadratic",
    "orthonormal_frame",
    "scalar_from_frame_sections",
    "bianchi_residual",
    "metric_compatibility_residual",
    "named_planes",
    "plane_vectors",
    "CurvatureReport",
    "curvature_report",
    "grad_laplace_round",
    "scalar_closed_form",
    "scalar_closed_grid",
    "scalar_field_numeric",
    "shape_sphere_factors",
    "shape_sphere_scalar_factored",
    "ScalarRelations",
    "scalar_relations_residual",
    "oneill_residual",
    "extrapolate_to_zero",
    "directional_limit",
    "special_limits",
]

#: central-difference step used to differentiate the Christoffel symbols
DERIV_STEP = 1e-5

#: relative area floor below which a 2-plane counts as degenerate
PLANE_TOL = 1e-12


# -- batched tensor assembly ---------------------------------------------------


def _metric_stack(fld, X: np.ndarray):
    """Evaluate the metric at every row of X; returns (G, dG) stacks."""
    n = fld.dim
    N = X.shape[0]
    G = np.empty((N, n, n))
    dG = np.empty((N, n, n, n))
    for idx in range(N):
        g, dg = fld.metric(X[idx])
        G[idx] = g
        dG[idx] = dg
    return G, dG


def _inverse_or_raise(G: np.ndarray) -> np.ndarray:
    n = G.shape[-1]
    dets = np.linalg.det(G)
    scale = np.max(np.abs(G), axis=(-2, -1)) ** n
    bad = ~np.isfinite(dets) | (np.abs(dets) < 1e-28 * scale)
    if np.any(bad):
        raise ChartSingular("metric degenerate (polar chart axis); take limits instead")
    return np.linalg.inv(G)


def _christoffel_stack(fld, X: np.ndarray):
    G, dG = _metric_stack(fld, X)
    Ginv = _inverse_or_raise(G)
    # T[p,k,i,j] = d_i g_kj + d_j g_ki - d_k g_ij
    T = dG.transpose(0, 1, 3, 2) + dG - dG.transpose(0, 3, 1, 2)
    return 0.5 * np.einsum("plk,pkij->plij", Ginv, T), G, Ginv


def _riemann_stack(fld, X: np.ndarray, step: float = DERIV_STEP):
    N, n = X.shape
    gamma, G, Ginv = _christoffel_stack(fld, X)
    shifted = np.empty((2 * n, N, n))
    for c in range(n):
        shifted[2 * c] = X
        shifted[2 * c][:, c] += step
        shifted[2 * c + 1] = X
        shifted[2 * c + 1][:, c] -= step
    gam_shift, _, _ = _christoffel_stack(fld, shifted.reshape(2 * n * N, n))
    gam_shift = gam_shift.reshape(2 * n, N, n, n, n)
    dgamma = np.empty((N, n, n, n, n))  # [p, c, l, i, j] = d_c Gamma^l_ij
    for c in range(n):
        dgamma[:, c] = (gam_shift[2 * c] - gam_shift[2 * c + 1]) / (2.0 * step)
    # A[p,l,k,i,j] = d_i Gamma^l_jk
    A = dgamma.transpose(0, 2, 4, 1, 3)
    riem = (
        A
        - A.transpose(0, 1, 2, 4, 3)
        + np.einsum("plim,pmjk->plkij", gamma, gamma)
        - np.einsum("pljm,pmik->plkij", gamma, gamma)
    )
    return riem, gamma, G, Ginv


def _point(x) -> np.ndarray:
    arr = np.asarray(getattr(x, "coords", lambda: x)(), dtype=float)
    return arr


# -- per-point operations ------------------------------------------------------


def christoffel(fld, x) -> np.ndarray:
    """Christoffel symbols gamma[l, i, j] at a point."""
    gamma, _, _ = _christoffel_stack(fld, _point(x)[None, :])
    return gamma[0]


def riemann(fld, x, step: float = DERIV_STEP) -> np.ndarray:
    """Riemann tensor riem[l, k, i, j] at a point."""
    riem, _, _, _ = _riemann_stack(fld, _point(x)[None, :], step)
    return riem[0]


def ricci(fld, x, step: float = DERIV_STEP) -> np.ndarray:
    """Ricci tensor ricci[k, j] at a point."""
    return np.einsum("lklj->kj", riemann(fld, x, step))


def scalar_curvature(fld, x, step: float = DERIV_STEP) -> float:
    """Scalar curvature at a point (double trace of Riemann)."""
    riem, _, G, Ginv = _riemann_stack(fld, _point(x)[None, :], step)
    ric = np.einsum("plklj->pkj", riem)
    return float(np.einsum("pkj,pkj->p", Ginv, ric)[0])


def biquadratic(g: np.ndarray, riem: np.ndarray, u, v) -> float:
    """Curvature biquadratic g(R(u, v)v, u) from precomputed tensors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    w = np.einsum("lkij,k,i,j->l", riem, v, u, v)  # R(u, v)v
    return float(u @ g @ w)


def _area_sq(g: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
    uu = float(u @ g @ u)
    vv = float(v @ g @ v)
    uv = float(u @ g @ v)
    return uu * vv - uv * uv, uu, vv


def sectional(fld, x, u, v, *, g=None, riem=None, step: float = DERIV_STEP) -> float:
    """Sectional curvature of the plane spanned by u and v."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if g is None or riem is None:
        r4, _, Gs, _ = _riemann_stack(fld, _point(x)[None, :], step)
        riem, g = r4[0], Gs[0]
    ar2, uu, vv = _area_sq(g, u, v)
    if ar2 <= PLANE_TOL * uu * vv:
        raise DegeneratePlane("vectors span a (numerically) degenerate 2-plane")
    return biquadratic(g, riem, u, v) / ar2


def orthonormal_frame(g: np.ndarray) -> np.ndarray:
    """Columns form a g-orthonormal frame (Cholesky construction)."""
    L = np.linalg.cholesky(g)
    return np.linalg.inv(L).T


def scalar_from_frame_sections(fld, x, step: float = DERIV_STEP) -> float:
    """Scalar curvature as the sum of sectional curvatures over frame pairs."""
    r4, _, Gs, _ = _riemann_stack(fld, _point(x)[None, :], step)
    riem, g = r4[0], Gs[0]
    E = orthonormal_frame(g)
    n = g.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += biquadratic(g, riem, E[:, i], E[:, j])
    return total


def bianchi_residual(fld, x, step: float = DERIV_STEP) -> float:
    """Max-abs first Bianchi cyclic sum of the numeric Riemann tensor."""
    riem = riemann(fld, x, step)
    cyc1 = riem.transpose(0, 3, 1, 2)
    cyc2 = cyc1.transpose(0, 3, 1, 2)
    return float(np.max(np.abs(riem + cyc1 + cyc2)))


def metric_compatibility_residual(fld, x) -> float:
    """Max-abs covariant derivative of g (zero for Levi-Civita symbols)."""
    gamma, G, _ = _christoffel_stack(fld, _point(x)[None, :])
    _, dG = _metric_stack(fld, _point(x)[None, :])
    nabla = (
        dG[0].transpose(2, 0, 1)
        - np.einsum("lki,lj->kij", gamma[0], G[0])
        - np.einsum("lkj,il->kij", gamma[0], G[0])
    )
    return float(np.max(np.abs(nabla)))


# -- named coordinate 2-planes -------------------------------------------------


def named_planes(fld) -> tuple[str, ...]:
    """Names of the distinguished coordinate 2-planes of a metric."""
    names = fld.coord_names
    pairs = [
        f"{names[i]}_{names[j]}"
        for i in range(len(names))
        for j in range(i + 1, len(names))
    ]
    if "xi1" in names and "xi2" in names:
        # horizontal combination cos(2 eta) d_xi1 + d_xi2
        if "r" in names:
            pairs.append("r_xi")
        pairs.append("eta_xi")
    return tuple(pairs)


def plane_vectors(fld, x, name: str) -> tuple[np.ndarray, np.ndarray]:
    """Basis vectors of a named coordinate 2-plane at a point."""
    coords = _point(x)
    names = fld.coord_names
    n = len(names)

    def unit(token: str) -> np.ndarray:
        vec = np.zeros(n)
        if token == "xi":
            eta = coords[names.index("eta")]
            vec[names.index("xi1")] = math.cos(2.0 * eta)
            vec[names.index("xi2")] = 1.0
        else:
            vec[names.index(token)] = 1.0
        return vec

    first, _, rest = name.partition("_")
    return unit(first), unit(rest)


@dataclass
class CurvatureReport:
    """Curvature data of one metric at one point."""

    point: np.ndarray
    g: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    sectional: dict = dataclass_field(default_factory=dict)

    def biquadratic(self, u, v) -> float:
        return biquadratic(self.g, self.riemann, u, v)

    def sectional_of(self, u, v) -> float:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        ar2, uu, vv = _area_sq(self.g, u, v)
        if ar2 <= PLANE_TOL * uu * vv:
            raise DegeneratePlane("vectors span a (numerically) degenerate 2-plane")
        return self.biquadratic(u, v) / ar2


def curvature_report(fld, x, step: float = DERIV_STEP) -> CurvatureReport:
    """Full curvature snapshot with sectional values on the named planes."""
    pt = _point(x)
    r4, gamma, Gs, Ginv = _riemann_stack(fld, pt[None, :], step)
    riem, g = r4[0], Gs[0]
    ric = np.einsum("lklj->kj", riem)
    scal = float(np.einsum("kj,kj", Ginv[0], ric))
    report = CurvatureReport(pt, g, gamma[0], riem, ric, scal)
    for name in named_planes(fld):
        u, v = plane_vectors(fld, pt, name)
        report.sectional[name] = report.sectional_of(u, v)
    return report


# -- closed-form scalar curvatures ---------------------------------------------


def grad_laplace_round(data: ConformalData) -> tuple[float, float]:
    """Round-sphere (radius 1/2) squared gradient and Laplacian of a factor."""
    return round_grad_sq(data), round_laplacian(data)


def _closed_from_parts(space: Space, kind: PotentialKind, F, grad_sq, lap, r):
    if kind is PotentialKind.INVERSE_SQUARE:
        if space is Space.S2:
            return (8.0 * F * F + grad_sq - F * lap) / F**3
        if space is Space.C2:
            return 1.5 * (4.0 * F * F + grad_sq - 2.0 * F * lap) / F**3
        if space is Space.R3:
            return (16.0 * F * F + 3.0 * grad_sq - 4.0 * F * lap) / (2.0 * F**3)
        return (12.0 * F * F + 3.0 * grad_sq - 4.0 * F * lap) / (2.0 * F**3)
    if space in (Space.S3, Space.S2):
        raise InvalidQuotient("no scaling quotient for the Newtonian potential")
    if space is Space.C2:
        return 1.5 * (3.0 * F * F + grad_sq - 2.0 * F * lap) / (r * F**3)
    return (30.0 * F * F + 6.0 * grad_sq - 8.0 * F * lap) / (4.0 * r * F**3)


def scalar_closed_form(
    space: Space,
    eta: float,
    xi2: float,
    potential: PotentialKind = PotentialKind.INVERSE_SQUARE,
    masses: MassConfig | None = None,
    r: float = 1.0,
) -> float:
    """Closed-form scalar curvature of the zero-energy metric on a space.

    Works for arbitrary masses: the formulas involve only the
    scale-reduced potential and its round-sphere derivatives.
    """
    if masses is None:
        masses = MassConfig.equal()
    data = shape_potential(masses, potential, eta, xi2)
    grad_sq, lap = grad_laplace_round(data)
    return _closed_from_parts(space, potential, data.value, grad_sq, lap, r)


def scalar_closed_grid(
    space: Space,
    eta,
    xi2,
    potential: PotentialKind = PotentialKind.INVERSE_SQUARE,
    r: float = 1.0,
):
    """Vectorized equal-mass closed-form scalar curvature (G = m = 1)."""
    stacks = h_grid(eta, xi2) if potential is PotentialKind.INVERSE_SQUARE else u_grid(eta, xi2)
    return _closed_from_parts(
        space, potential, stacks["value"], stacks["grad_sq"], stacks["laplacian"], r
    )


def scalar_field_numeric(fld: MetricField, eta, xi2, r: float = 1.0, xi1: float = 0.5, step: float = DERIV_STEP):
    """Numeric scalar curvature on a meshed (eta, xi2) grid.

    ``eta`` and ``xi2`` are 1-D arrays; the result has shape
    ``(len(eta), len(xi2))``.  Evaluation is batched over the grid.
    """
    eta = np.atleast_1d(np.asarray(eta, dtype=float))
    xi2 = np.atleast_1d(np.asarray(xi2, dtype=float))
    EE, XX = np.meshgrid(eta, xi2, indexing="ij")
    N = EE.size
    cols = {"eta": EE.ravel(), "xi2": XX.ravel()}
    cols["r"] = np.full(N, float(r))
    cols["xi1"] = np.full(N, float(xi1))
    X = np.column_stack([cols[name] for name in fld.coord_names])
    riem, _, _, Ginv = _riemann_stack(fld, X, step)
    ric = np.einsum("plklj->pkj", riem)
    return np.einsum("pkj,pkj->p", Ginv, ric).reshape(EE.shape)


# -- factored shape-sphere form ------------------------------------------------


def shape_sphere_factors(eta, xi2):
    """Sign-definite factors (A, B, C) of the shape-sphere scalar curvature.

    ``A >= 0`` (zero exactly on the 1-2 collision axis), ``B >= 0`` (zero
    exactly at the other two binary collisions and the equilateral
    points) and ``C < 0``, making the sign of ``A * B / C`` exact.
    """
    eta = np.asarray(eta, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    s_e, s2e = np.sin(eta), np.sin(2.0 * eta)
    c2e, c4e, c8e = np.cos(2.0 * eta), np.cos(4.0 * eta), np.cos(8.0 * eta)
    c4x, c8x = np.cos(4.0 * xi2), np.cos(8.0 * xi2)
    c2x = np.cos(2.0 * xi2)
    A = 8.0 * s_e**2 * ((c2e + 2.0) ** 2 - 3.0 * s2e**2 * c2x**2)
    B = (
        -8.0 * s2e**4 * c8x
        - 16.0 * s2e**2 * c4x * (c4e - 29.0)
        + 236.0 * c4e
        - 3.0 * c8e
        + 727.0
    )
    C = 3.0 * (2.0 * s2e**2 * c4x + c4e - 13.0) ** 3
    return A, B, C


def shape_sphere_scalar_factored(eta, xi2, G: float = 1.0, m: float = 1.0):
    """Shape-sphere scalar curvature via the factored form (sign-exact)."""
    A, B, C = shape_sphere_factors(eta, xi2)
    return A * B / (C * G * m**3)


# -- relations among the scalar curvatures -------------------------------------


@dataclass(frozen=True)
class ScalarRelations:
    """Scalar curvatures of all spaces at one shape point, with residuals."""

    values: dict
    residuals: dict
    chain_ok: bool


def scalar_relations_residual(
    eta: float,
    xi2: float,
    potential: PotentialKind = PotentialKind.INVERSE_SQUARE,
    G: float = 1.0,
    m: float = 1.0,
    r: float = 1.0,
) -> ScalarRelations:
    """Cross-relations among closed-form scalar curvatures at one point.

    For the 1/r**2 potential: expresses the configuration-space and
    quotient scalar curvatures through the shape-sphere one, checks the
    factored form against the derivative-based form, and evaluates the
    ordering chain (using the sign-exact factored value for the
    shape-sphere sign).  For the Newtonian potential: the one relation
    between the two scalar curvatures.
    """
    masses = MassConfig(m, m, m, G=G)
    data = shape_potential(masses, potential, eta, xi2)
    F = data.value
    grad_sq, lap = grad_laplace_round(data)
    if potential is PotentialKind.INVERSE_SQUARE:
        R = {
            sp: _closed_from_parts(sp, potential, F, grad_sq, lap, r)
            for sp in (Space.S2, Space.R3, Space.S3, Space.C2)
        }
        factored = float(shape_sphere_scalar_factored(eta, xi2, G, m))
        res = {
            "c2_from_s2": R[Space.C2] - (3.0 * R[Space.S2] - 1.5 * (12.0 * F * F + grad_sq) / F**3),
            "r3_from_s2": R[Space.R3] - (2.0 * R[Space.S2] - (16.0 * F * F + grad_sq) / (2.0 * F**3)),
            "s3_from_s2": R[Space.S3] - (2.0 * R[Space.S2] - (20.0 * F * F + grad_sq) / (2.0 * F**3)),
            "c2_from_s3": R[Space.C2] - (R[Space.S3] - lap / (F * F)),
            "s3_from_r3": R[Space.S3] - (R[Space.R3] - 2.0 / F),
            "s2_factored": R[Space.S2] - factored,
        }
        chain = (
            0.0 >= factored
            and factored > R[Space.R3]
            and R[Space.R3] >= R[Space.S3]
            and R[Space.S3] > R[Space.C2]
        )
        return ScalarRelations({sp.value: R[sp] for sp in R}, res, bool(chain))
    R_c2 = _closed_from_parts(Space.C2, potential, F, grad_sq, lap, r)
    R_r3 = _closed_from_parts(Space.R3, potential, F, grad_sq, lap, r)
    res = {
        "r3_from_c2": R_r3 - (2.0 * R_c2 / 3.0 + (9.0 * F * F + grad_sq) / (2.0 * r * F**3)),
    }
    return ScalarRelations({"C2": R_c2, "R3": R_r3}, res, bool(R_r3 > R_c2))


# -- submersion curvature comparisons ------------------------------------------

_ONEILL_PLANES = ("r_eta", "r_xi", "eta_xi", "eta_xi2", "eta_xi1", "xi1_xi2")


def oneill_residual(
    x_c2,
    plane: str,
    potential: PotentialKind = PotentialKind.INVERSE_SQUARE,
    energy: float = 0.0,
    masses: MassConfig | None = None,
    step: float = DERIV_STEP,
) -> float:
    """Submersion curvature-comparison residual for a named horizontal plane.

    Planes ``r_eta``, ``r_xi`` and ``eta_xi`` compare the configuration
    space against the rotation quotient (the last one carries the only
    nonzero vertical-bracket correction); planes ``eta_xi2``, ``eta_xi1``
    and ``xi1_xi2`` compare against the scaling quotient, where the
    correction vanishes for commuting coordinate fields.
    """
    if plane not in _ONEILL_PLANES:
        raise ValueError(f"unknown plane {plane!r}; expected one of {_ONEILL_PLANES}")
    if masses is None:
        masses = MassConfig.equal()
    total = MetricField(Space.C2, potential, energy, masses)
    pt = _point(x_c2)
    r, eta, xi1, xi2 = pt
    u, v = plane_vectors(total, pt, plane)
    r4, _, Gs, _ = _riemann_stack(total, pt[None, :], step)
    riem_tot, g_tot = r4[0], Gs[0]
    ar2, uu, vv = _area_sq(g_tot, u, v)
    if ar2 <= PLANE_TOL * uu * vv:
        raise DegeneratePlane("horizontal plane degenerate at this point")
    K_total = biquadratic(g_tot, riem_tot, u, v) / ar2

    if plane in ("r_eta", "r_xi", "eta_xi"):
        base = MetricField(Space.R3, potential, energy, masses)
        base_pt = np.array([r, eta, xi2])
        base_name = {"r_eta": "r_eta", "r_xi": "r_xi2", "eta_xi": "eta_xi2"}[plane]
        correction = 0.0
        if plane == "eta_xi":
            # [d_eta, cos(2 eta) d_xi1 + d_xi2] = -2 sin(2 eta) d_xi1, a vertical field
            bracket = np.zeros(4)
            bracket[2] = -2.0 * math.sin(2.0 * eta)
            vert = np.zeros(4)
            vert[2] = 1.0
            proj = (bracket @ g_tot @ vert) / (vert @ g_tot @ vert) * vert
            correction = 0.75 * float(proj @ g_tot @ proj) / ar2
    else:
        base = MetricField(Space.S3, potential, energy, masses)
        base_pt = np.array([eta, xi1, xi2])
        base_name = plane
        correction = 0.0

    ub, vb = plane_vectors(base, base_pt, base_name)
    K_base = sectional(base, base_pt, ub, vb, step=step)
    return K_base - K_total - correction


# -- limits at special points --------------------------------------------------


def extrapolate_to_zero(f, t0: float = 0.08, ratio: float = 0.6, levels: int = 6) -> float:
    """Polynomial (Neville) extrapolation of f(t) to t -> 0+."""
    ts = [t0 * ratio**k for k in range(levels)]
    p = [float(f(t)) for t in ts]
    for k in range(1, levels):
        p = [
            (ts[i] * p[i + 1] - ts[i + k] * p[i]) / (ts[i] - ts[i + k])
            for i in range(levels - k)
        ]
    return p[0]


def _plane_value(fld, pt, name, step=DERIV_STEP):
    u, v = plane_vectors(fld, pt, name)
    return sectional(fld, pt, u, v, step=step)


def directional_limit(
    fld,
    eta0: float,
    xi20: float,
    plane: str,
    direction: str,
    r: float = 1.0,
    xi1: float = 0.5,
    t0: float = 0.08,
    ratio: float = 0.6,
    levels: int = 6,
) -> float:
    """Limit of a named sectional curvature approaching (eta0, xi20).

    ``direction`` is the coordinate that varies: ``"eta"`` approaches
    along the constant-xi2 line, ``"xi2"`` along the constant-eta line.
    """

    def build(t):
        if direction == "eta":
            coords = {"eta": eta0 - t, "xi2": xi20}
        elif direction == "xi2":
            coords = {"eta": eta0, "xi2": xi20 + t}
        else:
            raise ValueError("direction must be 'eta' or 'xi2'")
        coords["r"] = r
        coords["xi1"] = xi1
        return np.array([coords[name] for name in fld.coord_names])

    return extrapolate_to_zero(lambda t: _plane_value(fld, build(t), plane), t0, ratio, levels)


_LIMIT_PLANES = ("r_eta", "r_xi", "eta_xi", "eta_xi2", "eta_xi1", "xi1_xi2")


def special_limits(step: float = DERIV_STEP) -> dict:
    """Limiting curvature table at distinguished shape-sphere points.

    Equal masses, zero energy, 1/r**2 potential, G = m = 1, r = 1.
    Keys are (point label, quantity) pairs.  Binary-collision entries
    record both directional limits separately (suffix ``@eta`` for the
    approach varying eta, ``@xi2`` for the approach varying xi2); the
    pairing of values with directions is reported as measured.
    """
    total = MetricField(Space.C2, PotentialKind.INVERSE_SQUARE, 0.0)
    table: dict = {}

    L4 = special_point("L4")
    pt_l4 = np.array([1.0, L4.eta, math.pi / 4.0, L4.xi2])
    for plane in _LIMIT_PLANES:
        table[("L4", f"K_{plane}")] = _plane_value(total, pt_l4, plane, step)
    table[("L4", "R_S2")] = scalar_closed_form(Space.S2, L4.eta, L4.xi2)

    # 1-2 collision axis: approach along eta at a generic xi2
    for plane in _LIMIT_PLANES:
        table[("C3", f"K_{plane}")] = extrapolate_to_zero(
            lambda t, p=plane: _plane_value(total, np.array([1.0, t, 0.5, 0.3]), p, step),
            t0=0.1,
            ratio=0.6,
            levels=6,
        )
    table[("C3", "R_C2")] = extrapolate_to_zero(
        lambda t: scalar_curvature(total, np.array([1.0, t, 0.5, 0.3]), step),
        t0=0.1,
        ratio=0.6,
        levels=6,
    )

    # other binary collisions: both directional limits
    for label in ("C1", "C2"):
        p = special_point(label)
        for plane in _LIMIT_PLANES:
            for direction in ("eta", "xi2"):
                table[(label, f"K_{plane}@{direction}")] = directional_limit(
                    total, p.eta, p.xi2, plane, direction
                )

    # near-collision model metrics: constant curvatures
    for kind, planes in (
        (NearCollisionKind.PAIR_R3, ("kappa_lam", "kappa_chi", "lam_chi")),
        (NearCollisionKind.PAIR_C2, ("kappa_lam", "kappa_xim", "lam_xim", "kappa_xip", "lam_xip", "xim_xip")),
        (NearCollisionKind.PAIR_S3, ("lam_xim", "lam_xip", "xim_xip")),
        (NearCollisionKind.PAIR_S2, ("lam_chi",)),
    ):
        model = near_collision_metric(kind)
        pt = np.full(model.dim, 0.35)
        table[(kind.name, "R")] = scalar_curvature(model, pt, step)
        for plane in planes:
            table[(kind.name, f"K_{plane}")] = _plane_value(model, pt, plane, step)
    return table
