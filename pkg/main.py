"""Command-line entry point for the retractional basis construction and its verifier."""
import argparse
import logging
import os
import sys
from typing import Optional, Sequence

from dotenv import load_dotenv

from checks import SUITE_GROUPS
from pipeline import COMMANDS, EXIT_CONFIG_ERROR, run_pipeline
from result_store import ResultStore
from run_config import ConfigError, RunConfig, load_run_config, run_id

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bd-nets",
        description="Build finite-stage retractional bases over Q and verify their claims exactly.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("config", help="path to the JSON run configuration")
    parser.add_argument("--output-dir", help="directory for the exported tables and summary.json")
    parser.add_argument(
        "--suites",
        help=f"comma-separated suite groups out of {','.join(SUITE_GROUPS)}; an empty value only builds",
    )
    parser.add_argument("--workers", type=int, help="worker threads for the Lipschitz and transport checks")
    return parser


def parse_suites(value: str) -> list[str]:
    groups = [g.strip() for g in value.split(",") if g.strip()]
    unknown = [g for g in groups if g not in SUITE_GROUPS]
    if unknown:
        raise ConfigError(f"unknown suite groups {unknown}; expected some of {', '.join(SUITE_GROUPS)}")
    return groups


def apply_cli_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates = {}
    if args.output_dir:
        updates["output_dir"] = args.output_dir
    if args.suites is not None:
        updates["suites"] = parse_suites(args.suites)
    if args.workers is not None:
        if args.workers < 1:
            raise ConfigError(f"--workers must be at least 1, got {args.workers}")
        updates["workers"] = args.workers
    return config.model_copy(update=updates) if updates else config


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command and return its exit status."""

    # Load environment variables
    load_dotenv()

    logging.basicConfig(
        level=os.getenv("LOG_LEVEL", "INFO").upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    args = build_parser().parse_args(argv)
    try:
        config = apply_cli_overrides(load_run_config(args.config), args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        return EXIT_CONFIG_ERROR

    store = None
    redis_url = os.getenv("REDIS_URL")
    if redis_url:
        store = ResultStore.connect(redis_url, run_id(config))
    else:
        logger.info("⚠ REDIS_URL not set, results are only written to disk")

    outcome = run_pipeline(config, args.command, store)
    logger.info("=" * 60)
    logger.info(f"Exit status {outcome.exit_status}; {len(outcome.artifacts)} artifacts in {config.output_dir}")
    logger.info("=" * 60)
    return outcome.exit_status


if __name__ == "__main__":
    sys.exit(main())
