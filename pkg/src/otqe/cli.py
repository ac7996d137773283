"""Command line: ``python -m otqe VERB --config PATH [--out DIR] ...``."""
from __future__ import annotations

import argparse
import sys

from . import __version__, runner
from .config import ConfigError, load_config

VERBS = ("map", "trace", "eqcheck", "cmax", "alphas")


def build_parser():
    p = argparse.ArgumentParser(prog="otqe", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("verb", choices=VERBS)
    p.add_argument("--config", required=True, help="run configuration file")
    p.add_argument("--out", help="output directory (overrides [run] out)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--tol", type=float, help="quadrature tolerance")
    p.add_argument("--seed", type=int, help="seed for randomized variants")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config).with_overrides(
            workers=args.workers, out=args.out, tol=args.tol, seed=args.seed).validate()
    except (OSError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.verb == "map":
            res = runner.run_map(cfg)
            bad = sum(r[-1] != "ok" for r in res.rows)
            print(f"wrote {res.path} ({len(res.rows)} points, {bad} not ok)")
        elif args.verb == "trace":
            trajs = runner.run_trace(cfg)
            for label, tr in trajs.items():
                print(f"{label}: C(end) = {tr.concurrence()[-1]:.6f}")
        elif args.verb == "eqcheck":
            rep = runner.run_equilibrium_check(cfg)
            print("\n".join(rep.lines()))
        elif args.verb == "cmax":
            for r in runner.run_cmax(cfg):
                print(f"{r.ratio:.3e}  C_max = {r.c_max:.6f}")
        elif args.verb == "alphas":
            rows = runner.run_alphas(cfg)
            print(f"wrote {len(rows)} alpha records")
    except runner.EquilibriumViolation as exc:
        print(f"equilibrium check FAILED\n{exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
