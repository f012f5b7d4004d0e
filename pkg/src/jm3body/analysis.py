"""Shape-sphere inequality machinery, grid scans, and the verification suite.

The conformal prefactor of the unit-size equal-mass metrics is the sum of
the three inverse squared side lengths.  Its power sums obey one algebraic
identity that converts curvature bounds into two scalar inequalities:

    12 u2^2 + |grad u2|^2 = u2^3 (8 * mean_term + 6 * spread_term)

with ``mean_term = (u2 + u4)/u2^2`` bounded below by 17/27 (attained at
the collinear central configurations) and ``spread_term = (u8 - u4^2)/
u2^3`` strictly above -1/2 (its observed minimum is -32/81, again at the
collinear points).  Together they keep ``bound_ratio = (12 u2^2 +
|grad u2|^2)/u2^3`` strictly above 55/27 everywhere off collisions, with
optimal constant 8/3; that floor feeds the strictly negative upper bounds
for the scalar curvatures of the full and rotation-reduced spaces.

``inequality_scan`` verifies all of this, plus the pointwise ordering
chain of the four zero-energy scalar curvatures, over a cell-centered
grid with collision neighborhoods masked; grid minima are sharpened by a
local simplex descent before they are compared with the analytic
locations.  ``curvature_field_sample`` writes closed-form curvature
fields as CSV for downstream plotting, and ``run_verification_suite``
executes every invariant family in the package as one deterministic,
seeded batch with a machine-readable report.

All CSV output uses 17 significant digits, LF line endings, and a leading
``# schema=1`` comment so identical configurations produce byte-identical
files; parallel grid evaluation (capped by the ``JM3BODY_THREADS``
environment variable) assembles its blocks in index order for the same
reason.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .conformal import COLLISION_SQ_TOL, PotentialKind, h_grid, _q_stacks
from .coords import MassConfig, PlanarConfig, Space
from .curvature import (
    _closed_from_parts,
    bianchi_residual,
    metric_compatibility_residual,
    oneill_residual,
    scalar_closed_grid,
    scalar_curvature,
    scalar_field_numeric,
    scalar_from_frame_sections,
    shape_sphere_scalar_factored,
    special_limits,
)
from .errors import CollisionPole
from .metrics import MetricField

__all__ = [
    "PowerSums",
    "power_sums",
    "cs_variables",
    "mean_term_boundary_closed_form",
    "spread_positivity_form",
    "spread_sufficiency_form",
    "GridSpec",
    "COLLISION_LOCI",
    "InequalityResult",
    "ScanReport",
    "inequality_scan",
    "FieldSample",
    "curvature_field_sample",
    "VerifyConfig",
    "SuiteOutcome",
    "SuiteReport",
    "run_verification_suite",
    "thread_count",
]

#: mean_term floor, attained at the collinear central configurations
MEAN_TERM_FLOOR = 17.0 / 27.0

#: strict spread_term floor; the observed minimum is SPREAD_TERM_MIN
SPREAD_TERM_FLOOR = -0.5
SPREAD_TERM_MIN = -32.0 / 81.0

#: strict floor for bound_ratio; the optimal constant is BOUND_RATIO_MIN
BOUND_RATIO_FLOOR = 55.0 / 27.0
BOUND_RATIO_MIN = 8.0 / 3.0

#: two-body collision points of the (eta, xi2) shape half-domain
COLLISION_LOCI = (
    (math.pi / 3.0, 0.0),
    (math.pi / 3.0, math.pi / 2.0),
    (math.pi / 3.0, math.pi),
)

_PAIRS = ((2, 3), (3, 1), (1, 2))


# -- power sums -----------------------------------------------------------------


@dataclass(frozen=True)
class PowerSums:
    """Power sums of the three inverse squared side lengths at unit size.

    ``u2``, ``u4`` and ``u8`` are the sums of the first, second and
    fourth powers; ``u2`` equals the conformal prefactor of the unit-size
    inverse-square metric.  ``grad_quarter`` is one quarter of the
    squared round-sphere gradient of ``u2`` expressed through the power
    sums, and ``mean_term``, ``spread_term`` and ``bound_ratio`` are the
    three normalized combinations whose floors (17/27, -1/2, 55/27)
    drive the curvature bounds.  Fields are scalars or arrays matching
    the input shape.
    """

    u2: float
    u4: float
    u8: float
    grad_quarter: float
    mean_term: float
    spread_term: float
    bound_ratio: float

    @property
    def grad_sq(self):
        """Squared round-sphere gradient of the prefactor (4x grad_quarter)."""
        return 4.0 * self.grad_quarter

    def identity_residual(self):
        """Relative defect of 12 u2^2 + |grad u2|^2 = u2^3 (8 mean + 6 spread)."""
        lhs = 12.0 * self.u2**2 + self.grad_sq
        rhs = self.u2**3 * (8.0 * self.mean_term + 6.0 * self.spread_term)
        return np.abs(lhs - rhs) / np.abs(lhs)


def power_sums(eta, xi2) -> PowerSums:
    """Power sums and inequality terms at shape angles (scalar or array).

    Raises
    ------
    CollisionPole
        When any pair separation vanishes to within the collision
        tolerance (scalar input reports the colliding pair; array input
        reports the first offending channel).
    """
    scalar_input = np.ndim(eta) == 0 and np.ndim(xi2) == 0
    qs = _q_stacks(eta, xi2)
    for (q, *_), pair in zip(qs, _PAIRS):
        if np.min(q) < 2.0 * COLLISION_SQ_TOL:
            raise CollisionPole(pair)
    v = [2.0 / q for (q, *_) in qs]
    u2 = v[0] + v[1] + v[2]
    u4 = v[0] ** 2 + v[1] ** 2 + v[2] ** 2
    u8 = v[0] ** 4 + v[1] ** 4 + v[2] ** 4
    grad_quarter = 0.5 * (-2.0 * u2**2 + 4.0 * u2 * u4 - 3.0 * u4**2 + 3.0 * u8)
    mean_term = (u2 + u4) / u2**2
    spread_term = (u8 - u4**2) / u2**3
    bound_ratio = (12.0 * u2**2 + 4.0 * grad_quarter) / u2**3
    if scalar_input:
        return PowerSums(
            float(u2), float(u4), float(u8), float(grad_quarter),
            float(mean_term), float(spread_term), float(bound_ratio),
        )
    return PowerSums(u2, u4, u8, grad_quarter, mean_term, spread_term, bound_ratio)


def cs_variables(eta, xi2):
    """Bounded shape variables (cos 2 eta, sin 2 eta cos 2 xi2) of a point."""
    eta = np.asarray(eta, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    return np.cos(2.0 * eta), np.sin(2.0 * eta) * np.cos(2.0 * xi2)


def mean_term_boundary_closed_form(eta):
    """mean_term along the boundary curves xi2 in {0, pi/2} of the half-domain."""
    return (5.0 * np.cos(6.0 * np.asarray(eta, dtype=float)) + 22.0) / 27.0


def spread_positivity_form(c, s):
    """Cleared form of spread_term > -1/2 in the bounded shape variables.

    Positive on the admissible disk c^2 + s^2 <= 1 exactly where the
    spread inequality holds.
    """
    c = np.asarray(c, dtype=float)
    s = np.asarray(s, dtype=float)
    return 0.375 * (20.0 - 3.0 * (c * c + s * s) ** 2 - 8.0 * c**3 + 24.0 * c * s * s)


def spread_sufficiency_form(c, s):
    """Simpler sufficient lower bound for the cleared spread form."""
    c = np.asarray(c, dtype=float)
    s = np.asarray(s, dtype=float)
    return 17.0 - 8.0 * c**3 + 24.0 * c * s * s


# -- grids ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Cell-centered rectangular grid on the shape half-domain."""

    shape: tuple = (400, 400)
    eta_range: tuple = (0.0, math.pi / 2.0)
    xi2_range: tuple = (0.0, math.pi)
    exclusion_radius: float = 1e-3

    def centers(self):
        n_eta, n_xi2 = self.shape
        eta = self.eta_range[0] + (np.arange(n_eta) + 0.5) * (
            (self.eta_range[1] - self.eta_range[0]) / n_eta
        )
        xi2 = self.xi2_range[0] + (np.arange(n_xi2) + 0.5) * (
            (self.xi2_range[1] - self.xi2_range[0]) / n_xi2
        )
        return eta, xi2

    def mesh(self):
        eta, xi2 = self.centers()
        return np.meshgrid(eta, xi2, indexing="ij")

    def mask(self):
        """True where a cell center stays clear of every collision locus."""
        EE, XX = self.mesh()
        keep = np.ones(EE.shape, dtype=bool)
        for eta0, xi20 in COLLISION_LOCI:
            keep &= (EE - eta0) ** 2 + (XX - xi20) ** 2 > self.exclusion_radius**2
        return keep


def thread_count(explicit=None) -> int:
    """Worker count for grid evaluation: explicit, else JM3BODY_THREADS, else 1."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("JM3BODY_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return 1


def _blocked_rows(n_rows: int, workers: int):
    """Contiguous row blocks covering range(n_rows), in order."""
    workers = min(max(workers, 1), n_rows)
    size = -(-n_rows // workers)
    return [range(lo, min(lo + size, n_rows)) for lo in range(0, n_rows, size)]


def _map_rows(fn, eta: np.ndarray, workers: int):
    """Evaluate fn on row blocks of eta (in parallel), stacked in index order."""
    blocks = _blocked_rows(len(eta), workers)
    if len(blocks) == 1:
        return fn(eta)
    with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
        parts = list(pool.map(lambda rows: fn(eta[rows.start : rows.stop]), blocks))
    return np.concatenate(parts, axis=0)


# -- inequality scan ------------------------------------------------------------


@dataclass(frozen=True)
class InequalityResult:
    """One verified inequality: its worst margin and where it occurs."""

    name: str
    strict: bool
    passed: bool
    min_slack: float
    argmin: tuple
    refined_value: float | None = None
    refined_location: tuple | None = None


@dataclass(frozen=True)
class ScanReport:
    """Outcome of the inequality scan over one grid configuration."""

    grid: GridSpec
    fault_shift: float
    results: tuple
    csv_path: str | None
    elapsed: float

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def result(self, name: str) -> InequalityResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _refine_minimum(quantity_fn, start, *, steps=400):
    """Sharpen a grid minimum by local simplex descent."""
    res = minimize(
        lambda p: float(quantity_fn(p[0], p[1])),
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": steps * 10, "maxfev": steps * 10},
    )
    return float(res.fun), (float(res.x[0]), float(res.x[1]))


def _scan_quantities(eta_rows, xi2, fault_shift):
    """Per-row-block arrays of every scanned quantity (keyed stack)."""
    EE, XX = np.meshgrid(eta_rows, xi2, indexing="ij")
    ps = power_sums(EE, XX)
    stacks = h_grid(EE, XX)
    F = stacks["value"] + fault_shift
    grad_sq, lap = stacks["grad_sq"], stacks["laplacian"]
    if fault_shift == 0.0:
        r_s2 = shape_sphere_scalar_factored(EE, XX)
    else:
        r_s2 = _closed_from_parts(Space.S2, PotentialKind.INVERSE_SQUARE, F, grad_sq, lap, 1.0)
    r_r3 = _closed_from_parts(Space.R3, PotentialKind.INVERSE_SQUARE, F, grad_sq, lap, 1.0)
    r_s3 = _closed_from_parts(Space.S3, PotentialKind.INVERSE_SQUARE, F, grad_sq, lap, 1.0)
    r_c2 = _closed_from_parts(Space.C2, PotentialKind.INVERSE_SQUARE, F, grad_sq, lap, 1.0)
    zeta_half = BOUND_RATIO_FLOOR / 2.0
    return np.stack(
        [
            ps.u2 - 3.0,
            ps.mean_term - MEAN_TERM_FLOOR,
            ps.spread_term - SPREAD_TERM_FLOOR,
            ps.bound_ratio - BOUND_RATIO_FLOOR,
            -r_s2,
            r_s2 - r_r3,
            r_r3 - r_s3,
            r_s3 - r_c2,
            -zeta_half - r_r3,
            -zeta_half - r_s3,
        ]
    ).transpose(1, 2, 0)


_SCAN_ROWS = (
    # (name, strict, refine-quantity or None)
    ("size-sum-floor", False, lambda e, x: power_sums(e, x).u2),
    ("mean-term-floor", False, lambda e, x: power_sums(e, x).mean_term),
    ("spread-term-floor", True, lambda e, x: power_sums(e, x).spread_term),
    ("bound-ratio-floor", True, lambda e, x: power_sums(e, x).bound_ratio),
    ("chain-s2-nonpositive", False, None),
    ("chain-s2-above-r3", True, None),
    ("chain-r3-at-least-s3", False, None),
    ("chain-s3-above-c2", True, None),
    ("upper-bound-r3", True, None),
    ("upper-bound-s3", True, None),
)


def inequality_scan(
    grid: GridSpec | None = None,
    *,
    fault_shift: float = 0.0,
    threads=None,
    out_path: str | None = None,
) -> ScanReport:
    """Verify every inequality of the bound machinery over a masked grid.

    ``fault_shift`` adds a constant to the conformal prefactor entering
    the scalar-curvature chain (power sums are untouched); it exists to
    demonstrate that the chain check actually bites.  Failures are
    reported in the results, never raised.  With ``out_path`` set, a
    summary CSV is written; identical configurations produce
    byte-identical files regardless of ``threads``.
    """
    t0 = time.perf_counter()
    grid = grid or GridSpec()
    eta, xi2 = grid.centers()
    keep = grid.mask()
    slacks = _map_rows(lambda rows: _scan_quantities(rows, xi2, fault_shift), eta, thread_count(threads))

    results = []
    for idx, (name, strict, refine_fn) in enumerate(_SCAN_ROWS):
        field = np.where(keep, slacks[:, :, idx], np.inf)
        flat = int(np.argmin(field))
        i, j = np.unravel_index(flat, field.shape)
        min_slack = float(field[i, j])
        passed = min_slack > 0.0 if strict else min_slack >= -1e-12
        refined_value = refined_location = None
        if refine_fn is not None:
            refined_value, refined_location = _refine_minimum(
                refine_fn, (eta[i], xi2[j])
            )
        results.append(
            InequalityResult(
                name=name,
                strict=strict,
                passed=passed,
                min_slack=min_slack,
                argmin=(float(eta[i]), float(xi2[j])),
                refined_value=refined_value,
                refined_location=refined_location,
            )
        )

    csv_path = None
    if out_path is not None:
        csv_path = str(out_path)
        _write_scan_csv(csv_path, grid, fault_shift, results)
    return ScanReport(
        grid=grid,
        fault_shift=fault_shift,
        results=tuple(results),
        csv_path=csv_path,
        elapsed=time.perf_counter() - t0,
    )


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _write_scan_csv(path, grid: GridSpec, fault_shift: float, results):
    lines = [
        "# schema=1",
        "# kind=inequality-scan",
        f"# grid={grid.shape[0]}x{grid.shape[1]}"
        f" eta=[{_fmt(grid.eta_range[0])},{_fmt(grid.eta_range[1])}]"
        f" xi2=[{_fmt(grid.xi2_range[0])},{_fmt(grid.xi2_range[1])}]"
        f" exclusion={_fmt(grid.exclusion_radius)} fault_shift={_fmt(fault_shift)}",
        "name,strict,passed,min_slack,argmin_eta,argmin_xi2,refined_value,refined_eta,refined_xi2",
    ]
    for r in results:
        refined = (
            (_fmt(r.refined_value), _fmt(r.refined_location[0]), _fmt(r.refined_location[1]))
            if r.refined_value is not None
            else ("", "", "")
        )
        lines.append(
            ",".join(
                [
                    r.name,
                    "strict" if r.strict else "nonstrict",
                    "pass" if r.passed else "fail",
                    _fmt(r.min_slack),
                    _fmt(r.argmin[0]),
                    _fmt(r.argmin[1]),
                    *refined,
                ]
            )
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


# -- curvature field sampling ---------------------------------------------------


@dataclass(frozen=True)
class FieldSample:
    """A sampled curvature field with its observed extrema."""

    space: Space
    potential: PotentialKind
    quantity: str
    grid: GridSpec
    csv_path: str | None
    count: int
    min_value: float
    min_location: tuple
    max_value: float
    max_location: tuple


def curvature_field_sample(
    space: Space,
    potential: PotentialKind,
    grid: GridSpec | None = None,
    quantity: str = "scalar",
    *,
    out_path: str | None = None,
    threads=None,
) -> FieldSample:
    """Closed-form curvature field on a masked grid, optionally written as CSV.

    ``quantity`` is ``"scalar"`` for the scalar curvature on any space or
    ``"gaussian"`` for half of it on the two-dimensional shape sphere.
    Values are in reduced units with G = m = 1: the inverse-square fields
    at unit size, the Newtonian ones per unit size (their overall 1/r
    factor is divided out, as noted in the CSV header).
    """
    grid = grid or GridSpec()
    if quantity not in ("scalar", "gaussian"):
        raise ValueError("quantity must be 'scalar' or 'gaussian'")
    if quantity == "gaussian" and space is not Space.S2:
        raise ValueError("gaussian curvature is defined on the two-dimensional shape sphere")
    eta, xi2 = grid.centers()
    keep = grid.mask()
    values = _map_rows(
        lambda rows: np.asarray(
            scalar_closed_grid(space, *np.meshgrid(rows, xi2, indexing="ij"), potential)
        ),
        eta,
        thread_count(threads),
    )
    if quantity == "gaussian":
        values = values / 2.0

    masked_min = np.where(keep, values, np.inf)
    masked_max = np.where(keep, values, -np.inf)
    imin = np.unravel_index(int(np.argmin(masked_min)), values.shape)
    imax = np.unravel_index(int(np.argmax(masked_max)), values.shape)
    sample = FieldSample(
        space=space,
        potential=potential,
        quantity=quantity,
        grid=grid,
        csv_path=str(out_path) if out_path is not None else None,
        count=int(np.count_nonzero(keep)),
        min_value=float(values[imin]),
        min_location=(float(eta[imin[0]]), float(xi2[imin[1]])),
        max_value=float(values[imax]),
        max_location=(float(eta[imax[0]]), float(xi2[imax[1]])),
    )
    if out_path is not None:
        _write_field_csv(sample, eta, xi2, values, keep)
    return sample


def _write_field_csv(sample: FieldSample, eta, xi2, values, keep):
    units = (
        "inverse-square reduced (unit size, G = m = 1)"
        if sample.potential is PotentialKind.INVERSE_SQUARE
        else "newtonian reduced per unit size (overall 1/size factor divided out, G = m = 1)"
    )
    head = [
        "# schema=1",
        "# kind=curvature-field",
        f"# space={sample.space.value} potential={sample.potential.value}"
        f" quantity={sample.quantity}",
        f"# grid={sample.grid.shape[0]}x{sample.grid.shape[1]}"
        f" exclusion={_fmt(sample.grid.exclusion_radius)}",
        f"# units: {units}",
        "eta,xi2,value",
    ]
    body = []
    for i in range(len(eta)):
        for j in range(len(xi2)):
            if keep[i, j]:
                body.append(f"{_fmt(eta[i])},{_fmt(xi2[j])},{_fmt(values[i, j])}")
    tail = [
        f"# max={_fmt(sample.max_value)} at eta={_fmt(sample.max_location[0])}"
        f" xi2={_fmt(sample.max_location[1])}",
        f"# min={_fmt(sample.min_value)} at eta={_fmt(sample.min_location[0])}"
        f" xi2={_fmt(sample.min_location[1])}",
    ]
    with open(sample.csv_path, "w", newline="") as fh:
        fh.write("\n".join(head + body + tail) + "\n")


# -- verification suite ---------------------------------------------------------


@dataclass(frozen=True)
class VerifyConfig:
    """Configuration of the batch verification run."""

    seed: int = 20260822
    grid: tuple = (400, 400)
    exclusion_radius: float = 1e-3
    include_newtonian: bool = True
    fault_shift: float = 0.0
    threads: int | None = None
    sample_count: int = 200
    closed_numeric_n: int = 60
    out_path: str | None = None


@dataclass(frozen=True)
class SuiteOutcome:
    name: str
    status: str  # "pass" | "fail" | "skip"
    detail: str
    elapsed: float


@dataclass(frozen=True)
class SuiteReport:
    config: VerifyConfig
    outcomes: tuple
    elapsed: float

    @property
    def all_passed(self) -> bool:
        return all(o.status != "fail" for o in self.outcomes)

    @property
    def exit_code(self) -> int:
        return 0 if self.all_passed else 1

    def outcome(self, name: str) -> SuiteOutcome:
        for o in self.outcomes:
            if o.name == name:
                return o
        raise KeyError(name)


def _suite_coordinate_roundtrips(cfg: VerifyConfig) -> str:
    from .coords import (
        hopf_from_rescaled,
        jacobi_from_positions,
        positions_from_jacobi,
        rescaled_from_hopf,
        rescaled_from_jacobi,
    )

    rng = np.random.default_rng(cfg.seed + 1)
    masses = MassConfig.equal()
    worst = 0.0
    for _ in range(cfg.sample_count):
        raw = rng.normal(size=6)
        pos = PlanarConfig(
            complex(raw[0], raw[1]), complex(raw[2], raw[3]), complex(raw[4], raw[5])
        ).centered(masses)
        j1, j2, jcm = jacobi_from_positions(pos, masses)
        z1, z2 = rescaled_from_jacobi(j1, j2, masses)
        if abs(z1) < 1e-6 and abs(z2) < 1e-6:
            continue
        back_z = rescaled_from_hopf(hopf_from_rescaled(z1, z2))
        back_pos = positions_from_jacobi(j1, j2, jcm, masses)
        scale = max(abs(z1), abs(z2), 1e-30)
        worst = max(worst, abs(back_z[0] - z1) / scale, abs(back_z[1] - z2) / scale)
        for a, b in zip(back_pos.positions, pos.positions):
            worst = max(worst, abs(a - b) / max(abs(b), 1.0))
    if worst > 1e-10:
        raise AssertionError(f"roundtrip residual {worst:.3e} exceeds 1e-10")
    return f"worst roundtrip residual {worst:.3e} over {cfg.sample_count} configurations"


def _random_chart_point(rng, space: Space):
    eta = rng.uniform(0.25, math.pi / 2.0 - 0.25)
    xi2 = rng.uniform(0.3, math.pi - 0.3)
    if min(abs(eta - math.pi / 3.0), 1.0) < 0.08 and min(abs(xi2), abs(xi2 - math.pi / 2.0), abs(xi2 - math.pi)) < 0.08:
        eta += 0.1
    coords = {"eta": eta, "xi2": xi2, "r": rng.uniform(0.7, 1.5), "xi1": rng.uniform(0.0, 2.0)}
    return np.array([coords[name] for name in space.coord_names])


def _suite_metric_derivatives(cfg: VerifyConfig) -> str:
    rng = np.random.default_rng(cfg.seed + 2)
    combos = [
        (Space.C2, PotentialKind.INVERSE_SQUARE, 1.0),
        (Space.R3, PotentialKind.INVERSE_SQUARE, 0.0),
        (Space.S3, PotentialKind.INVERSE_SQUARE, 0.0),
        (Space.S2, PotentialKind.INVERSE_SQUARE, 0.0),
    ]
    if cfg.include_newtonian:
        combos += [
            (Space.C2, PotentialKind.NEWTONIAN, -1.0),
            (Space.R3, PotentialKind.NEWTONIAN, 0.5),
        ]
    step = 1e-6
    worst = 0.0
    for space, pot, energy in combos:
        fld = MetricField(space, pot, energy=energy)
        for _ in range(max(10, cfg.sample_count // 10)):
            x = _random_chart_point(rng, space)
            g, dg = fld.metric(x)
            scale = float(np.max(np.abs(g)))
            for k in range(space.dim):
                xp, xm = x.copy(), x.copy()
                xp[k] += step
                xm[k] -= step
                fd = (fld.metric(xp)[0] - fld.metric(xm)[0]) / (2.0 * step)
                worst = max(worst, float(np.max(np.abs(fd - dg[:, :, k]))) / scale)
    if worst > 1e-6:
        raise AssertionError(f"analytic metric derivative off by {worst:.3e} (rel)")
    return f"worst relative derivative defect {worst:.3e}"


def _suite_curvature_identities(cfg: VerifyConfig) -> str:
    rng = np.random.default_rng(cfg.seed + 3)
    worst_b = worst_c = worst_s = worst_o = 0.0
    for space, energy in ((Space.C2, 1.0), (Space.R3, 0.0), (Space.S3, 0.0), (Space.S2, 0.0)):
        fld = MetricField(space, PotentialKind.INVERSE_SQUARE, energy=energy)
        for _ in range(max(6, cfg.sample_count // 25)):
            x = _random_chart_point(rng, space)
            worst_b = max(worst_b, bianchi_residual(fld, x))
            worst_c = max(worst_c, metric_compatibility_residual(fld, x))
            direct = scalar_curvature(fld, x)
            framed = scalar_from_frame_sections(fld, x)
            worst_s = max(worst_s, abs(direct - framed) / max(abs(direct), 1.0))
    for _ in range(4):
        x = _random_chart_point(rng, Space.C2)
        for plane in ("r_eta", "r_xi", "eta_xi", "eta_xi2", "eta_xi1", "xi1_xi2"):
            worst_o = max(worst_o, abs(oneill_residual(x, plane)))
    if worst_b > 1e-5 or worst_c > 1e-8 or worst_s > 1e-6 or worst_o > 1e-5:
        raise AssertionError(
            f"curvature identities: bianchi {worst_b:.3e} compat {worst_c:.3e}"
            f" scalar-vs-frame {worst_s:.3e} submersion {worst_o:.3e}"
        )
    return (
        f"bianchi {worst_b:.3e}, compatibility {worst_c:.3e},"
        f" scalar-vs-frame {worst_s:.3e}, submersion {worst_o:.3e}"
    )


def _closed_numeric_combos(include_newtonian: bool):
    combos = [
        (Space.S2, PotentialKind.INVERSE_SQUARE),
        (Space.R3, PotentialKind.INVERSE_SQUARE),
        (Space.S3, PotentialKind.INVERSE_SQUARE),
        (Space.C2, PotentialKind.INVERSE_SQUARE),
    ]
    if include_newtonian:
        combos += [(Space.R3, PotentialKind.NEWTONIAN), (Space.C2, PotentialKind.NEWTONIAN)]
    return combos


def closed_numeric_deviation(space, potential, n=60, margin=1e-2, exclusion=1e-2, step=1e-5):
    """Max |closed - numeric| scalar curvature over a masked lattice.

    The grid keeps the stated margin from the chart edges and masks disks
    of the stated radius around the interior collision points.  The
    numeric field is Richardson-extrapolated over two differencing steps,
    which removes the quadratic truncation term that would otherwise
    dominate near the polar chart edge and the collision poles.
    """
    eta = np.linspace(margin, math.pi / 2.0 - margin, n)
    xi2 = np.linspace(margin, math.pi - margin, n)
    fld = MetricField(space, potential, energy=0.0)
    full = scalar_field_numeric(fld, eta, xi2, step=step)
    half = scalar_field_numeric(fld, eta, xi2, step=step / 2.0)
    numeric = (4.0 * half - full) / 3.0
    EE, XX = np.meshgrid(eta, xi2, indexing="ij")
    closed = scalar_closed_grid(space, EE, XX, potential)
    keep = np.ones(EE.shape, dtype=bool)
    for eta0, xi20 in COLLISION_LOCI:
        keep &= (EE - eta0) ** 2 + (XX - xi20) ** 2 > exclusion**2
    return float(np.max(np.abs(np.where(keep, closed - numeric, 0.0))))


def _suite_scalar_closed_vs_numeric(cfg: VerifyConfig) -> str:
    # inverse-square only; the newtonian lattice lives in its own skippable suite
    details = []
    for space, pot in _closed_numeric_combos(False):
        dev = closed_numeric_deviation(space, pot, n=cfg.closed_numeric_n)
        details.append(f"{space.value}/{pot.value} {dev:.3e}")
        if dev > 1e-5:
            raise AssertionError(f"closed vs numeric scalar on {space.value}/{pot.value}: {dev:.3e}")
    return "; ".join(details)


#: frozen limiting constants at the distinguished points (equal masses)
SPECIAL_CONSTANTS = {
    ("L4", "K_r_eta"): -2.0 / 3.0,
    ("L4", "K_r_xi"): -2.0 / 3.0,
    ("L4", "K_eta_xi"): -1.0,
    ("L4", "K_eta_xi2"): -1.0,
    ("L4", "K_eta_xi1"): -1.0 / 3.0,
    ("L4", "K_xi1_xi2"): -1.0 / 3.0,
    ("L4", "R_S2"): 0.0,
    ("C3", "R_C2"): -12.0,
    ("PAIR_R3", "R"): -4.0,
    ("PAIR_S3", "R"): -4.0,
    ("PAIR_C2", "R"): -12.0,
    ("PAIR_R3", "K_kappa_lam"): -2.0,
    ("PAIR_S3", "K_lam_xim"): -2.0,
    ("PAIR_C2", "K_kappa_lam"): -2.0,
    ("PAIR_S2", "R"): 0.0,
}


def _suite_special_constants(cfg: VerifyConfig) -> str:
    table = special_limits()
    worst = 0.0
    for key, expected in SPECIAL_CONSTANTS.items():
        got = table[key]
        defect = abs(got - expected)
        worst = max(worst, defect)
        if defect > 1e-4:
            raise AssertionError(f"{key}: got {got!r}, expected {expected!r}")
    return f"{len(SPECIAL_CONSTANTS)} limiting constants within 1e-4 (worst {worst:.3e})"


def _suite_power_sum_identities(cfg: VerifyConfig) -> str:
    rng = np.random.default_rng(cfg.seed + 6)
    eta = rng.uniform(0.05, math.pi / 2.0 - 0.05, cfg.sample_count)
    xi2 = rng.uniform(0.05, math.pi - 0.05, cfg.sample_count)
    ps = power_sums(eta, xi2)
    ident = float(np.max(ps.identity_residual()))
    grads = h_grid(eta, xi2)["grad_sq"]
    cross = float(np.max(np.abs(ps.grad_sq - grads) / np.abs(grads + 1.0)))
    qs = _q_stacks(eta, xi2)
    recip = float(np.max(np.abs(sum(q / 2.0 for (q, *_) in qs) - 3.0)))
    edge_eta = rng.uniform(0.05, math.pi / 2.0 - 0.05, 50)
    boundary = 0.0
    for x2 in (0.0, math.pi / 2.0):
        got = power_sums(edge_eta, np.full_like(edge_eta, x2)).mean_term
        boundary = max(boundary, float(np.max(np.abs(got - mean_term_boundary_closed_form(edge_eta)))))
    theta = rng.uniform(0.0, 2.0 * math.pi, 200)
    rad = np.sqrt(rng.uniform(0.0, 1.0, 200))
    disk = float(np.min(spread_positivity_form(rad * np.cos(theta), rad * np.sin(theta))))
    cpos = rng.uniform(0.0, 1.0, 200)
    spos = rng.uniform(-1.0, 1.0, 200)
    suff = float(np.min(spread_sufficiency_form(cpos, spos)))
    if ident > 1e-10 or cross > 1e-10 or recip > 1e-12 or boundary > 1e-12:
        raise AssertionError(
            f"identity {ident:.3e} cross {cross:.3e} reciprocal {recip:.3e} boundary {boundary:.3e}"
        )
    if disk <= 0.0 or suff <= 0.0:
        raise AssertionError(f"positivity forms dipped to {disk:.3e} / {suff:.3e}")
    return (
        f"identity {ident:.3e}, gradient cross-check {cross:.3e},"
        f" reciprocal-sum {recip:.3e}, boundary {boundary:.3e},"
        f" positivity floors {disk:.3f}/{suff:.3f}"
    )


def _suite_inequality_scan(cfg: VerifyConfig) -> str:
    report = inequality_scan(
        GridSpec(shape=tuple(cfg.grid), exclusion_radius=cfg.exclusion_radius),
        fault_shift=cfg.fault_shift,
        threads=cfg.threads,
    )
    failed = [r.name for r in report.results if not r.passed]
    summary = []
    for name in ("size-sum-floor", "mean-term-floor", "spread-term-floor", "bound-ratio-floor"):
        r = report.result(name)
        summary.append(f"{name} min {r.refined_value:.9f}")
    if failed:
        raise AssertionError(f"inequalities failed: {', '.join(failed)} ({'; '.join(summary)})")
    return f"all {len(report.results)} inequalities hold; " + "; ".join(summary)


def _suite_flow_equivalence(cfg: VerifyConfig) -> str:
    from .dynamics import compare_trajectory_geodesic, homothety_collision_time

    details = []
    if cfg.include_newtonian:
        omega = math.sqrt(3.0)
        fld = MetricField(Space.C2, PotentialKind.NEWTONIAN, energy=-1.5)
        x0 = np.array([1.0, math.pi / 4.0, 0.0, math.pi / 4.0])
        v0 = np.array([0.0, 0.0, omega, 0.0])
        dev = compare_trajectory_geodesic(fld, x0, v0, math.pi / omega).max_deviation
        details.append(f"rotation {dev:.3e}")
        if dev > 1e-6:
            raise AssertionError(f"rotation flow comparison deviates by {dev:.3e}")
    fld = MetricField(Space.C2, PotentialKind.INVERSE_SQUARE, energy=0.0)
    x0 = np.array([1.0, math.pi / 4.0, 0.5, math.pi / 4.0])
    v0 = np.array([-math.sqrt(6.0), 0.0, 0.0, 0.0])
    dev = compare_trajectory_geodesic(fld, x0, v0, 0.12).max_deviation
    details.append(f"pure-scaling infall {dev:.3e}")
    if dev > 1e-6:
        raise AssertionError(f"scaling-flow comparison deviates by {dev:.3e}")
    tc0 = homothety_collision_time(1.0, 0.0)
    exact = 1.0 / (2.0 * math.sqrt(6.0))
    details.append(f"free-fall time defect {abs(tc0 - exact):.3e}")
    if abs(tc0 - exact) > 1e-12:
        raise AssertionError("marginal free-fall time does not match the exact value")
    return "; ".join(details)


def _suite_tidal_closed_forms(cfg: VerifyConfig) -> str:
    from .stability import (
        homothety_tensor_closed_form,
        rotation_tensor_closed_form,
        stability_tensor,
        stability_verdicts,
    )

    details = []
    if cfg.include_newtonian:
        omega = math.sqrt(3.0)
        fld = MetricField(Space.C2, PotentialKind.NEWTONIAN, energy=-1.5)
        rep = stability_tensor(
            fld,
            np.array([1.0, math.pi / 4.0, 0.0, math.pi / 4.0]),
            np.array([0.0, 0.0, omega, 0.0]),
        )
        dev = float(np.max(np.abs(rep.tensor - rotation_tensor_closed_form(omega))))
        details.append(f"rotation tensor {dev:.3e}")
        if dev > 1e-5:
            raise AssertionError(f"rotation tidal tensor off closed form by {dev:.3e}")
    worst = 0.0
    for energy in (-2.0, -1.0, 0.0, 1.0):
        x = np.array([1.0, math.pi / 4.0, 0.5, math.pi / 4.0])
        v = np.array([1.0, 0.0, 0.0, 0.0])
        fld = MetricField(Space.C2, PotentialKind.INVERSE_SQUARE, energy=energy)
        rep = stability_tensor(fld, x, v)
        closed = homothety_tensor_closed_form(1.0, 1.0, energy, PotentialKind.INVERSE_SQUARE)
        worst = max(worst, float(np.max(np.abs(rep.tensor - closed))))
        if cfg.include_newtonian:
            fldn = MetricField(Space.C2, PotentialKind.NEWTONIAN, energy=energy)
            repn = stability_tensor(fldn, x, v)
            closedn = homothety_tensor_closed_form(1.0, 1.0, energy, PotentialKind.NEWTONIAN)
            worst = max(worst, float(np.max(np.abs(repn.tensor - closedn))))
    details.append(f"scaling-ray tensors {worst:.3e}")
    if worst > 1e-5:
        raise AssertionError(f"scaling-ray tidal tensors off closed forms by {worst:.3e}")
    windows = []
    for energy, expect in ((1.0, "unstable"), (-1.0, "mixed"), (-1.6, "stable")):
        fld = MetricField(Space.C2, PotentialKind.INVERSE_SQUARE, energy=energy)
        rep = stability_tensor(
            fld, np.array([1.0, math.pi / 4.0, 0.5, math.pi / 4.0]), np.array([1.0, 0.0, 0.0, 0.0])
        )
        got = stability_verdicts(rep, energy, 1.0)
        shape = (got["eta"], got["xi1"], got["xi2"])
        ok = {
            "unstable": shape == ("unstable", "unstable", "unstable"),
            "stable": shape == ("stable", "stable", "stable"),
            "mixed": shape == ("unstable", "stable", "unstable"),
        }[expect]
        windows.append(ok)
        if not ok:
            raise AssertionError(f"verdict window at energy {energy} came out {shape}")
    details.append(f"{len(windows)} verdict windows")
    return "; ".join(details)


def _suite_deviation_oracle(cfg: VerifyConfig) -> str:
    from .dynamics import integrate_geodesic
    from .stability import jacobi_field_evolve

    fld = MetricField(Space.C2, PotentialKind.INVERSE_SQUARE, energy=1.0)
    x0 = np.array([1.0, 0.7, 0.5, 0.4])
    u0 = np.array([0.5, -0.2, 0.3, 0.25])
    g0 = fld.metric(x0)[0]
    u0 = u0 / math.sqrt(float(u0 @ g0 @ u0))
    y0 = np.array([0.3, -0.2, 0.1, 0.4])
    yd0 = np.array([0.1, 0.2, -0.3, 0.05])
    rec = integrate_geodesic(fld, x0, u0, 1.0)
    lam = np.linspace(0.0, 1.0, 11)
    ev = jacobi_field_evolve(rec, y0, yd0, lam_values=lam)
    delta = 1e-6
    plus = integrate_geodesic(fld, x0 + 0.5 * delta * y0, u0 + 0.5 * delta * yd0, 1.0)
    minus = integrate_geodesic(fld, x0 - 0.5 * delta * y0, u0 - 0.5 * delta * yd0, 1.0)
    fd = np.array([(plus.dense(t)[:4] - minus.dense(t)[:4]) / delta for t in lam])
    rel = float(np.max(np.abs(ev.components - fd)) / np.max(np.abs(fd)))
    if rel > 1e-3:
        raise AssertionError(f"deviation field vs differenced geodesics: {rel:.3e}")
    return f"deviation field matches differenced geodesics to {rel:.3e}"


def _suite_newtonian_closed_forms(cfg: VerifyConfig) -> str:
    from .dynamics import binary_target, collision_distance_probe
    from .metrics import NearCollisionKind, near_collision_metric

    details = []
    for space in (Space.R3, Space.C2):
        dev = closed_numeric_deviation(space, PotentialKind.NEWTONIAN, n=cfg.closed_numeric_n)
        details.append(f"{space.value} scalar {dev:.3e}")
        if dev > 1e-5:
            raise AssertionError(f"newtonian scalar on {space.value}: {dev:.3e}")
    model = near_collision_metric(NearCollisionKind.NEWTONIAN_C2)
    prof = collision_distance_probe(
        model, np.array([1.0, 0.1, 0.5, 0.3]), binary_target((1, 2)), 1e-6
    )
    exact = 2.0 * math.sqrt(1.0 / math.sqrt(2.0)) * math.sqrt(0.1)
    defect = abs(prof.limit - exact)
    details.append(f"binary approach length defect {defect:.3e}")
    if prof.classification != "finite" or defect > 1e-8:
        raise AssertionError(f"newtonian binary approach length off by {defect:.3e}")
    return "; ".join(details)


_SUITES = (
    ("coordinate-roundtrips", _suite_coordinate_roundtrips, False),
    ("metric-derivatives", _suite_metric_derivatives, False),
    ("curvature-identities", _suite_curvature_identities, False),
    ("scalar-closed-vs-numeric", _suite_scalar_closed_vs_numeric, False),
    ("special-point-constants", _suite_special_constants, False),
    ("power-sum-identities", _suite_power_sum_identities, False),
    ("inequality-scan", _suite_inequality_scan, False),
    ("flow-equivalence", _suite_flow_equivalence, False),
    ("tidal-closed-forms", _suite_tidal_closed_forms, False),
    ("deviation-oracle", _suite_deviation_oracle, False),
    ("newtonian-closed-forms", _suite_newtonian_closed_forms, True),
)


def run_verification_suite(config: VerifyConfig | None = None) -> SuiteReport:
    """Execute every invariant family as one deterministic, seeded batch.

    Failures are captured per suite (never raised); the report's
    ``exit_code`` is nonzero when any suite fails.  Suites that need the
    Newtonian potential are marked skipped when the configuration
    excludes it.  With ``out_path`` set, a versioned JSON report is
    written.
    """
    cfg = config or VerifyConfig()
    t0 = time.perf_counter()
    outcomes = []
    for name, fn, newtonian_only in _SUITES:
        if newtonian_only and not cfg.include_newtonian:
            outcomes.append(SuiteOutcome(name, "skip", "newtonian potential excluded", 0.0))
            continue
        t1 = time.perf_counter()
        try:
            detail = fn(cfg)
            status = "pass"
        except Exception as exc:  # noqa: BLE001 - suite isolation is the point
            detail = f"{type(exc).__name__}: {exc}"
            status = "fail"
        outcomes.append(SuiteOutcome(name, status, detail, time.perf_counter() - t1))
    report = SuiteReport(config=cfg, outcomes=tuple(outcomes), elapsed=time.perf_counter() - t0)
    if cfg.out_path is not None:
        _write_suite_json(report)
    return report


def _write_suite_json(report: SuiteReport):
    cfg = report.config
    payload = {
        "schema": 1,
        "seed": cfg.seed,
        "grid": list(cfg.grid),
        "exclusion_radius": cfg.exclusion_radius,
        "include_newtonian": cfg.include_newtonian,
        "fault_shift": cfg.fault_shift,
        "sample_count": cfg.sample_count,
        "suites": [
            {"name": o.name, "status": o.status, "detail": o.detail, "elapsed": round(o.elapsed, 3)}
            for o in report.outcomes
        ],
        "all_passed": report.all_passed,
        "exit_code": report.exit_code,
    }
    with open(cfg.out_path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
