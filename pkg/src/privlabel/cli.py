"""Command-line entry point: one subcommand per pipeline stage plus ``run``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from privlabel.config import load_config
from privlabel.errors import ConfigError
from privlabel.pipeline import STAGES, run_pipeline


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="privlabel",
        description="Derive privacy labels from privacy policies and audit declared labels.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="flat key = value config file")
    common.add_argument("--seed", type=int, help="override the configured seed")
    common.add_argument("--jobs", type=int, help="worker processes for per-policy stages")
    common.add_argument("--out", type=Path, help="override the output directory")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for stage in STAGES:
        sub.add_parser(stage, parents=[common], help=f"run the {stage} stage")
    run = sub.add_parser("run", parents=[common], help="run several stages in order (default: all)")
    run.add_argument("--stages", default=",".join(STAGES), help="comma-separated stage names")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        overrides = {k: v for k, v in (("seed", args.seed), ("jobs", args.jobs), ("out_dir", args.out))
                     if v is not None}
        cfg = cfg.replace(**overrides)
    except ConfigError as exc:
        print(json.dumps({"status": 2, "error": "ConfigError", "message": str(exc)}), file=sys.stderr)
        return 2
    stages = args.stages if args.command == "run" else args.command
    result = run_pipeline(cfg, stages)
    for stage, counts in result.summary.items():
        print(f"{stage}: {json.dumps(counts, sort_keys=True)}")
    if result.status:
        print(json.dumps(result.error, sort_keys=True), file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
