"""Command-line front end: run experiments, list the registry, inspect laws.

    bplab run <name> [--config file] [--seed u64] [--out dir]
                     [--workers n] [--stable-output]
    bplab list
    bplab law-info --pmf 0.25,0,0.75

Exit code is 0 iff the overall verdict is pass.
"""

from __future__ import annotations

import argparse
import sys

from . import experiments, offspring, pgf


def _cmd_run(args) -> int:
    try:
        cfg = experiments.parse_config(
            args.config,
            name=args.name,
            seed=args.seed,
            out_dir=args.out,
            workers=args.workers,
            stable_output=True if args.stable_output else None,
        )
        report = experiments.run(cfg)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for m in report.metrics:
        print(f"[{m.verdict.upper():4s}] {m.name} = {m.value!r} "
              f"(target {m.target!r}, {m.tolerance})")
    print(f"overall: {report.overall}")
    if cfg.out_dir:
        print(f"report written to {cfg.out_dir}/report.json")
    return 0 if report.passed else 1


def _cmd_list(_args) -> int:
    for name, summary in experiments.list_experiments():
        print(f"{name:18s} {summary}")
    return 0


def _cmd_law_info(args) -> int:
    try:
        masses = [float(x) for x in args.pmf.replace(",", " ").split()]
        dist = offspring.make_finite(masses)
        q = pgf.extinction_prob(dist)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"pmf (normalized): {[round(float(p), 12) for p in dist.pmf]}")
    print(f"mean m           : {dist.mean!r}")
    print(f"variance sigma^2 : {dist.variance!r}")
    print(f"E[L log+ L]      : {dist.llogl!r}")
    print(f"extinction q     : {q!r}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="bplab",
        description="Branching-process laboratory: seed-reproducible "
                    "experiments for the classical limit theorems.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a named experiment")
    p_run.add_argument("name", help="experiment name (see 'bplab list')")
    p_run.add_argument("--config", help="JSON config file", default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--workers", type=int, default=None)
    p_run.add_argument("--stable-output", action="store_true",
                       help="omit timing so reports are byte-stable")
    p_run.set_defaults(fn=_cmd_run)

    p_list = sub.add_parser("list", help="list registered experiments")
    p_list.set_defaults(fn=_cmd_list)

    p_info = sub.add_parser("law-info", help="describe a finite offspring law")
    p_info.add_argument("--pmf", required=True,
                        help="comma- or space-separated masses, e.g. 0.25,0,0.75")
    p_info.set_defaults(fn=_cmd_law_info)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
