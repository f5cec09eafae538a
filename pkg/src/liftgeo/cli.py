"""Command-line front end: ``liftgeo check|list-checks|list-builtins|describe``."""

from __future__ import annotations

import argparse
import json
import sys

from . import tangent as tm
from .definitions import BUILTINS, load_manifold
from .errors import LiftGeoError
from .harness import DESCRIPTIONS, EXIT_ERROR, REGISTRY, RunConfig, default_seed, exit_code, run_check


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="liftgeo", description="Numerical checks for lifted structures on tangent bundles.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="run one registered check")
    c.add_argument("name", help="check name (see list-checks)")
    c.add_argument("--manifold", required=True, help="definition file path or builtin:NAME")
    c.add_argument("--tm-metric", default="sasaki", help="sasaki | twisted:f,h | gradient:f")
    c.add_argument("--tm-connection", default="horizontal", help=" | ".join(tm.CONNECTION_KINDS))
    c.add_argument("--base-connection", default="definition", choices=("definition", "levi-civita", "zero"))
    c.add_argument("--field", help="vector field name from the definition")
    c.add_argument("--lift", default="horizontal", choices=tm.LIFT_KINDS)
    c.add_argument("--k", type=int, default=2, help="order for k-stein")
    c.add_argument("--directions", type=int, default=10, help="directions per point for Jacobi checks")
    c.add_argument("--samples", type=int, default=20)
    c.add_argument("--seed", type=int, default=None, help="default: $LIFTGEO_SEED or 0")
    c.add_argument("--tol", type=float, default=None)
    c.add_argument("--fiber-range", type=float, default=2.0)
    c.add_argument("--curvature-sign", type=int, choices=(1, -1), default=1)
    c.add_argument("--json", dest="output", help="write the JSON report here instead of stdout")

    sub.add_parser("list-checks", help="list registered checks")
    sub.add_parser("list-builtins", help="list built-in manifolds")
    d = sub.add_parser("describe", help="print a manifold definition as JSON")
    d.add_argument("--manifold", required=True)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "list-checks":
            for name in REGISTRY:
                print(f"{name:22s} {DESCRIPTIONS[name]}")
            return 0
        if args.command == "list-builtins":
            for name in BUILTINS:
                print(name)
            return 0
        if args.command == "describe":
            print(json.dumps(load_manifold(args.manifold).describe(), indent=2))
            return 0
        seed = args.seed if args.seed is not None else default_seed()
        defn = load_manifold(args.manifold, seed=seed)
        cfg = RunConfig(seed=seed, samples=args.samples, fiber_range=args.fiber_range, tol=args.tol,
                        curvature_sign=args.curvature_sign, output=args.output, tm_metric=args.tm_metric,
                        tm_connection=args.tm_connection, base_connection=args.base_connection,
                        field=args.field, lift=args.lift, k=args.k, directions=args.directions)
        report = run_check(defn, args.name, cfg)
    except (LiftGeoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        print(report.summary())
    else:
        sys.stdout.write(report.to_json())
    return exit_code(report)


if __name__ == "__main__":
    sys.exit(main())
