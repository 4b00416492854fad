"""Command-line entry point: ``quadshift {run,verify,convergence,sweep}``.

Exit codes: 0 success or verify pass, 1 verify fail, 2 config error,
3 runtime error raised by the numerics.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import pipeline
from .errors import ConfigError, QuadShiftError
from .scenario import load_config, read_json

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quadshift",
        description="Simulate 1D quadratic Hamiltonians and check the linear-term shift.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_help="scenario config (JSON, schema 1)"):
        p.add_argument("--config", required=True, help=config_help)
        p.add_argument("--out", required=True, help="output directory")
        return p

    common(sub.add_parser("run", help="evolve a scenario and write series/snapshots"))
    v = common(sub.add_parser("verify", help="compare full and stripped evolutions"))
    v.add_argument("--corrupt-beta", type=float, default=None,
                   help="debug: add this multiple of hbar to beta (pi gives a sign flip)")
    c = common(sub.add_parser("convergence", help="rerun verify with dt halved per level"))
    c.add_argument("--levels", type=int, default=3, help="number of dt levels (>= 3)")
    s = common(sub.add_parser("sweep", help="run patched copies of a template config"),
               config_help="template config (JSON)")
    s.add_argument("--overrides", required=True, help='JSON list of {"name", "patch"} objects')
    s.add_argument("--mode", choices=("run", "verify"), default="run")
    s.add_argument("--jobs", type=int, default=1, help="worker processes")
    return parser


def _cmd_run(args):
    summary, _ = pipeline.run(load_config(args.config), args.out)
    fin = summary["final"]
    print(f"run: {summary['n_steps']} steps, final t={fin['t']:.6g} "
          f"var_x={fin['var_x']:.10g} norm drift={summary['max_norm_drift']:.2e}")
    print(f"artifacts in {args.out}")
    return EXIT_OK


def _cmd_verify(args):
    rep = pipeline.verify(load_config(args.config), corrupt_beta=args.corrupt_beta, out_dir=args.out)
    sm = rep.summary
    for key, tol in rep.tolerances.items():
        val = sm[key]
        shown = "n/a" if val is None else f"{val:.3e}"
        print(f"  {key:24s} {shown:>10s}  (tol {tol:g})")
    print(f"verify {rep.name}: {'PASS' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_convergence(args):
    rows = pipeline.convergence(load_config(args.config), args.levels, args.out)
    for r in rows:
        print("  " + "  ".join(pipeline._cell(r[c]) for c in pipeline.CONVERGENCE_COLUMNS))
    print(f"convergence table in {os.path.join(args.out, 'convergence.csv')}")
    return EXIT_OK


def _cmd_sweep(args):
    if args.jobs < 1:
        raise ConfigError("jobs", f"must be >= 1, got {args.jobs}")
    manifest = pipeline.sweep(read_json(args.config), read_json(args.overrides),
                              args.out, mode=args.mode, jobs=args.jobs)
    for e in manifest["entries"]:
        print(f"  {e['name']}: {e['status']}" + (f" ({e['error']})" if "error" in e else ""))
    print(f"manifest in {os.path.join(args.out, 'manifest.json')}")
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "verify": _cmd_verify,
    "convergence": _cmd_convergence,
    "sweep": _cmd_sweep,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadShiftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
