"""Command-line entry point: ``hgraph {verify,uniqueness,convergence}``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, HGraphError
from .experiments import Kind, ScenarioConfig, emit_failure, emit_outputs, run

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CHECK = 0, 1, 2, 3

SCHEMA_HELP = """\
config file (TOML); unknown keys are rejected:
  kind = "verify" | "uniqueness" | "convergence"   (must match the subcommand)
  name = "scenario label"     H = 1.0     seed = 0
  [domain]      x_range = [lo, hi]; b_minus, b_plus = [[x, y], ...] or a number;
                pinched_left = false; random = false; min_width, max_width, knots
  [data]        f_minus, f_plus = [[x, v], ...] or a number; oracle = "none" | "cylinder";
                random = false; lipschitz; offset
  [mesh]        nx, ny (strips); rings (disk)
  [rect]        a, b, center = [cx, cy]
  [checks]      x0 = [sites]
  [solver]      grad_tol, max_iters, armijo_c, armijo_shrink, grad_cap
  [uniqueness]  lengths = [L, ...]; delta; sites = [x, ...]; cells_per_unit
  [convergence] oracle = "cap" | "cylinder"; radius; half_width; length; levels; min_order

exit codes: 0 success, 1 config error, 2 solver error, 3 check failure
"""


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hgraph",
        description="Solve constant mean curvature graph problems and check height estimates.",
        epilog=SCHEMA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in Kind:
        s = sub.add_parser(kind.value, epilog=SCHEMA_HELP, formatter_class=argparse.RawDescriptionHelpFormatter)
        s.add_argument("--config", required=True, help="scenario TOML file")
        s.add_argument("--out", required=True, help="output directory")
        s.add_argument("--seed", type=int, default=None, help="override the config seed (unsigned 64-bit)")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = ScenarioConfig.load(args.config, args.seed)
        if cfg.kind.value != args.command:
            raise ConfigError(f"config kind {cfg.kind.value!r} does not match subcommand {args.command!r}")
        record = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HGraphError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if record.status != "ok":
        path = emit_failure(record, args.out)
        print(f"solver error: {record.error} (report: {path})", file=sys.stderr)
        return EXIT_SOLVER
    paths = emit_outputs(record, args.out)
    failed = [r for r in record.reports if not r.passed]
    for path in paths:
        print(path)
    if failed:
        for r in failed:
            print(f"FAILED {r.name} at x0={r.x0}: {r.measured} > {r.bound} + {r.slack}", file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
