"""Command-line interface for the geodesic three-body toolkit.

Subcommands map one-to-one onto the library's top-level operations:

``field``
    Sample a closed-form curvature field over the shape half-domain and
    optionally write it as CSV.
``scan``
    Run the inequality scan (power-sum floors, curvature ordering chain,
    strict upper bounds) over a masked grid.
``flow``
    Integrate a trajectory and its reclocked geodesic twin and report
    their pointwise deviation.
``stability``
    Diagonalize the tidal operator at a state and print the verdict per
    eigendirection.
``verify``
    Execute the full verification suite; the exit status reflects it.
``limits``
    Print the extrapolated limiting constants at the distinguished
    points.

All commands are deterministic for fixed inputs; ``JM3BODY_THREADS``
caps grid parallelism.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from .analysis import (
    GridSpec,
    VerifyConfig,
    curvature_field_sample,
    inequality_scan,
    run_verification_suite,
)
from .conformal import PotentialKind
from .coords import MassConfig, Space
from .errors import GeometryError
from .metrics import MetricField

_POTENTIALS = {
    "inverse-square": PotentialKind.INVERSE_SQUARE,
    "newtonian": PotentialKind.NEWTONIAN,
    "none": None,
}


def _parse_space(text: str) -> Space:
    try:
        return Space[text.upper()]
    except KeyError:
        raise argparse.ArgumentTypeError(
            f"unknown space {text!r}; expected one of C2, R3, S3, S2"
        ) from None


def _parse_grid(text: str):
    try:
        n, m = text.lower().split("x")
        shape = (int(n), int(m))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 400x400, got {text!r}") from None
    if shape[0] < 2 or shape[1] < 2:
        raise argparse.ArgumentTypeError("grid must be at least 2x2")
    return shape


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_masses(text: str) -> MassConfig:
    values = _parse_floats(text)
    if len(values) != 3 or np.any(values <= 0.0):
        raise argparse.ArgumentTypeError("masses must be three positive numbers m1,m2,m3")
    return MassConfig(*values)


def _field_from_args(args) -> MetricField:
    masses = args.masses if args.masses is not None else MassConfig.equal()
    return MetricField(args.space, _POTENTIALS[args.potential], energy=args.energy, masses=masses)


def _require_equal_masses(args, what: str):
    if args.masses is not None and not args.masses.is_equal:
        raise GeometryError(f"{what} is implemented for equal masses only")


def cmd_field(args) -> int:
    _require_equal_masses(args, "closed-form field sampling")
    potential = _POTENTIALS[args.potential]
    if potential is None:
        raise GeometryError("field sampling needs a potential: inverse-square or newtonian")
    grid = GridSpec(shape=args.grid, exclusion_radius=args.exclusion)
    sample = curvature_field_sample(
        args.space, potential, grid, args.quantity, out_path=args.out, threads=args.threads
    )
    print(
        f"field {args.space.value}/{potential.value} quantity={args.quantity}"
        f" grid={grid.shape[0]}x{grid.shape[1]} rows={sample.count}"
    )
    print(f"min={sample.min_value:.12g} at eta={sample.min_location[0]:.9f} xi2={sample.min_location[1]:.9f}")
    print(f"max={sample.max_value:.12g} at eta={sample.max_location[0]:.9f} xi2={sample.max_location[1]:.9f}")
    if sample.csv_path:
        print(f"wrote {sample.csv_path}")
    return 0


def cmd_scan(args) -> int:
    _require_equal_masses(args, "the inequality scan")
    grid = GridSpec(shape=args.grid, exclusion_radius=args.exclusion)
    report = inequality_scan(
        grid, fault_shift=args.fault_shift, threads=args.threads, out_path=args.out
    )
    print(
        f"inequality scan grid={grid.shape[0]}x{grid.shape[1]}"
        f" exclusion={grid.exclusion_radius:g} fault_shift={args.fault_shift:g}"
    )
    for r in report.results:
        mark = "pass" if r.passed else "FAIL"
        line = (
            f"[{mark}] {r.name:24s} min_slack={r.min_slack: .6e}"
            f" at eta={r.argmin[0]:.6f} xi2={r.argmin[1]:.6f}"
        )
        if r.refined_value is not None:
            line += f"  refined_min={r.refined_value:.12g}"
        print(line)
    if report.csv_path:
        print(f"wrote {report.csv_path}")
    print(f"result: {'all inequalities hold' if report.all_passed else 'FAILURES detected'}")
    return 0 if report.all_passed else 1


def cmd_flow(args) -> int:
    from .dynamics import compare_trajectory_geodesic

    fld = _field_from_args(args)
    if len(args.start) != fld.space.dim or len(args.velocity) != fld.space.dim:
        raise GeometryError(
            f"{fld.space.value} needs {fld.space.dim} components for --start/--velocity"
        )
    res = compare_trajectory_geodesic(fld, args.start, args.velocity, args.horizon)
    ok = res.max_deviation < args.tol
    print(
        f"flow {fld.space.value}/{args.potential} energy={args.energy:g}"
        f" horizon={args.horizon:g}"
    )
    final = ", ".join(f"{v:.9g}" for v in res.trajectory_states[-1])
    print(f"final state: [{final}]")
    print(f"max deviation trajectory vs geodesic: {res.max_deviation:.6e} (tol {args.tol:g})")
    print(f"result: {'equivalent within tolerance' if ok else 'DEVIATION above tolerance'}")
    return 0 if ok else 1


def cmd_stability(args) -> int:
    from .stability import stability_tensor, stability_verdicts

    fld = _field_from_args(args)
    if len(args.point) != fld.space.dim or len(args.velocity) != fld.space.dim:
        raise GeometryError(
            f"{fld.space.value} needs {fld.space.dim} components for --point/--velocity"
        )
    report = stability_tensor(fld, args.point, args.velocity)
    print(f"stability {fld.space.value}/{args.potential} energy={args.energy:g}")
    print(f"point: [{', '.join(f'{v:g}' for v in report.point)}]")
    for kappa, verdict in zip(report.eigenvalues, report.verdicts):
        print(f"eigenvalue {kappa: .9e}  {verdict}")
    print(
        f"residuals: symmetry {report.symmetry_residual:.2e},"
        f" zero-mode {report.zero_mode_residual:.2e},"
        f" eigenvalue-vs-section {report.kappa_area_residual:.2e}"
    )
    if fld.space is Space.C2:
        per_axis = stability_verdicts(report, args.energy, float(report.point[0]))
        print(
            "per-coordinate verdicts: "
            + ", ".join(f"{name}={verdict}" for name, verdict in per_axis.items())
        )
    return 0


def cmd_verify(args) -> int:
    cfg = VerifyConfig(
        seed=args.seed,
        grid=args.grid,
        exclusion_radius=args.exclusion,
        include_newtonian=not args.exclude_newtonian,
        fault_shift=args.fault_shift,
        threads=args.threads,
        out_path=args.out,
    )
    if args.quick:
        from dataclasses import replace

        cfg = replace(cfg, grid=(150, 150), sample_count=50, closed_numeric_n=25)
    report = run_verification_suite(cfg)
    for o in report.outcomes:
        print(f"[{o.status:4s}] {o.name:26s} {o.elapsed:6.2f}s  {o.detail}")
    if cfg.out_path:
        print(f"wrote {cfg.out_path}")
    print(f"result: {'all suites passed' if report.all_passed else 'FAILURES detected'}")
    return report.exit_code


def cmd_limits(args) -> int:
    from .curvature import special_limits

    table = special_limits()
    rows = sorted(table.items(), key=lambda kv: (kv[0][0], kv[0][1]))
    for (label, quantity), value in rows:
        print(f"{label:10s} {quantity:12s} {value: .9e}")
    if args.out:
        lines = ["# schema=1", "# kind=special-limits", "label,quantity,value"]
        lines += [f"{label},{quantity},{'%.17g' % value}" for (label, quantity), value in rows]
        with open(args.out, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {args.out}")
    return 0


def _add_common(sub, *, space=False, potential=False, grid=None, out=False):
    if space:
        sub.add_argument("--space", type=_parse_space, default=Space.C2,
                         help="chart: C2, R3, S3, or S2 (default C2)")
    if potential:
        sub.add_argument("--potential", choices=sorted(_POTENTIALS), default="inverse-square")
        sub.add_argument("--energy", type=float, default=0.0)
        sub.add_argument("--masses", type=_parse_masses, default=None,
                         help="three comma-separated masses (default equal)")
    if grid is not None:
        sub.add_argument("--grid", type=_parse_grid, default=grid,
                         help=f"grid as NxM (default {grid[0]}x{grid[1]})")
        sub.add_argument("--exclusion", type=float, default=1e-3,
                         help="masking radius around collision points")
        sub.add_argument("--threads", type=int, default=None,
                         help="worker cap (default JM3BODY_THREADS or 1)")
    if out:
        sub.add_argument("--out", default=None, help="write results to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jm3body",
        description="Curvature, stability, and inequality toolkit for the "
        "geodesic formulation of the planar three-body problem.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("field", help="sample a closed-form curvature field")
    _add_common(p, space=True, potential=True, grid=(400, 400), out=True)
    p.add_argument("--quantity", choices=("scalar", "gaussian"), default="scalar")
    p.set_defaults(func=cmd_field)

    p = commands.add_parser("scan", help="run the inequality scan")
    _add_common(p, grid=(400, 400), out=True)
    p.add_argument("--masses", type=_parse_masses, default=None, help=argparse.SUPPRESS)
    p.add_argument("--fault-shift", type=float, default=0.0,
                   help="prefactor shift injected into the curvature chain (demo)")
    p.set_defaults(func=cmd_scan)

    p = commands.add_parser("flow", help="compare a trajectory with its geodesic twin")
    _add_common(p, space=True, potential=True, out=False)
    p.add_argument("--start", type=_parse_floats, required=True,
                   help="initial chart point, comma-separated")
    p.add_argument("--velocity", type=_parse_floats, required=True,
                   help="initial velocity, comma-separated")
    p.add_argument("--horizon", type=float, default=1.0, help="physical time horizon")
    p.add_argument("--tol", type=float, default=1e-6, help="deviation gate for the exit status")
    p.set_defaults(func=cmd_flow)

    p = commands.add_parser("stability", help="tidal spectrum and verdicts at a state")
    _add_common(p, space=True, potential=True, out=False)
    p.add_argument("--point", type=_parse_floats, required=True)
    p.add_argument("--velocity", type=_parse_floats, required=True)
    p.set_defaults(func=cmd_stability)

    p = commands.add_parser("verify", help="run the verification suite")
    _add_common(p, grid=(400, 400), out=True)
    p.add_argument("--seed", type=int, default=20260822)
    p.add_argument("--exclude-newtonian", action="store_true",
                   help="skip suites that need the newtonian potential")
    p.add_argument("--fault-shift", type=float, default=0.0,
                   help="inject a prefactor shift to demonstrate failure detection")
    p.add_argument("--quick", action="store_true",
                   help="smaller grids and samples for a fast pass")
    p.set_defaults(func=cmd_verify)

    p = commands.add_parser("limits", help="limiting constants at distinguished points")
    p.add_argument("--out", default=None, help="write the table as CSV")
    p.set_defaults(func=cmd_limits)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GeometryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
