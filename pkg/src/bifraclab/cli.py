"""Command-line entry point.

Subcommands:
  run <config-file>   run an experiment described by a key=value file
  oracle <module>     brute-force cross-checks on oracle-scale grids
  report <path>       re-summarize a CSV report and compare summaries

Exit codes: 0 success, 1 assertion/check failure, 2 config error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .experiments import ExperimentConfig, ExperimentReport, recompute_summary, run_experiment
from .oracle import run_module_checks


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bifraclab")
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config")
    run_p.add_argument("--seed", type=int, default=None)
    run_p.add_argument("--grid", type=int, default=None, help="override cells per axis")
    run_p.add_argument("--out", default=None)
    run_p.add_argument("--format", choices=("csv", "json"), default=None)

    oracle_p = sub.add_parser("oracle", help="run brute-force cross-checks")
    oracle_p.add_argument("module")

    report_p = sub.add_parser("report", help="re-summarize a CSV report")
    report_p.add_argument("path")
    return parser


def _cmd_run(args) -> int:
    if not os.path.exists(args.config):
        print(f"error: config file not found: {args.config}", file=sys.stderr)
        return 2
    try:
        config = ExperimentConfig.from_file(args.config)
        overrides = {
            "seed": args.seed,
            "cells": args.grid,
            "out": args.out,
            "format": args.format,
        }
        for key, value in overrides.items():
            if value is not None:
                setattr(config, key, value)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_experiment(config)
    except AssertionError as exc:
        print(f"assertion failure: {exc}", file=sys.stderr)
        return 1
    if config.out:
        report.write(config.out, config.format)
        print(f"wrote {config.out} ({len(report.rows)} rows, format={config.format})")
    else:
        sys.stdout.write(report.serialize(config.format))
    return 0


def _cmd_oracle(args) -> int:
    try:
        results = run_module_checks(args.module)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    passed = sum(ok for _, ok in results)
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"{args.module}: {passed}/{len(results)} oracle checks passed")
    return 0 if passed == len(results) else 1


def _cmd_report(args) -> int:
    if not os.path.exists(args.path):
        print(f"error: report file not found: {args.path}", file=sys.stderr)
        return 2
    report = ExperimentReport.from_csv(args.path)
    if not report.mode:
        print("error: report is missing '# meta mode' line", file=sys.stderr)
        return 2
    recomputed = recompute_summary(report.mode, report.header, report.rows)
    for key in sorted(recomputed):
        print(f"{key} = {recomputed[key]}")
    if recomputed != report.summary:
        print("summary mismatch: embedded summary differs from recomputation", file=sys.stderr)
        return 1
    print("summary verified")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args, extra = parser.parse_known_args(argv)
    except SystemExit as exc:  # argparse exits on invalid choices
        return int(exc.code or 0)
    if extra or args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    handler = {"run": _cmd_run, "oracle": _cmd_oracle, "report": _cmd_report}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
