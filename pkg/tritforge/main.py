"""
TritForge command line

Usage:
    python -m tritforge verify --all
    python -m tritforge tau B1 B2 B3
    python -m tritforge qec --cycles 10 --theta 0.3 --rotate-site --seed 7
    python -m tritforge timing --format json
    python -m tritforge dump B3 --incomplete
    python -m tritforge list
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from pydantic import ValidationError

from tritforge import __version__
from tritforge.commands import catalog, qec, tau, timing, verify
from tritforge.config.environment import config
from tritforge.utils.error_handlers import (
    EXIT_USAGE,
    TritforgeError,
    create_error_response,
    handle_command_error,
)
from tritforge.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

COMMON_DEFAULTS = {
    "format": "table",
    "out": None,
    "tolerance": None,
    "seed": None,
    "log_level": None,
}


def _common_parser() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["table", "json", "csv"], default=argparse.SUPPRESS,
                        help="output format (default table)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output to PATH instead of stdout")
    common.add_argument("--tolerance", type=float, default=argparse.SUPPRESS,
                        help="equivalence tolerance (default 1e-10)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="Monte Carlo seed (falls back to TRITFORGE_SEED)")
    common.add_argument("--log-level", default=argparse.SUPPRESS,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="tritforge",
        description="Mixed qubit/qutrit simulator and Toffoli verification suite",
        parents=[common],
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    for module in (verify, tau, qec, timing, catalog):
        module.register(subparsers, [common])
    return parser


def resolve_seed(seed: Optional[int]) -> int:
    """--seed, then TRITFORGE_SEED, then the configured default."""
    if seed is not None:
        return seed
    env_seed = os.getenv("TRITFORGE_SEED")
    if env_seed:
        try:
            return int(env_seed)
        except ValueError:
            logger.warning(f"Ignoring non-integer TRITFORGE_SEED '{env_seed}'")
    return config.SEED


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    args = build_parser().parse_args(argv)
    for key, value in COMMON_DEFAULTS.items():
        if not hasattr(args, key):
            setattr(args, key, value)
    args.seed = resolve_seed(args.seed)
    return args


def _report_failure(args: argparse.Namespace, error: dict) -> None:
    if args.format == "json":
        sys.stdout.write(json.dumps(error, indent=2) + "\n")


def main(argv: Optional[List[str]] = None) -> int:
    args = parse_args(argv)
    setup_logging(log_level=args.log_level or config.LOG_LEVEL, log_file=config.LOG_FILE)

    is_valid, errors = config.validate()
    if not is_valid:
        for message in errors:
            logger.error(f"Configuration error: {message}")
        return EXIT_USAGE

    logger.debug(f"Configuration: {config.get_config_summary()}")
    logger.debug(f"Running '{args.command}' with seed {args.seed}")
    try:
        return args.handler(args)
    except ValidationError as e:
        messages = "; ".join(err["msg"] for err in e.errors())
        logger.error(f"Invalid arguments: {messages}")
        _report_failure(args, create_error_response(EXIT_USAGE, messages, {"type": "ValidationError"}))
        return EXIT_USAGE
    except (TritforgeError, OSError) as e:
        error = handle_command_error(e)
        _report_failure(args, error)
        return error["exit_code"]


if __name__ == "__main__":
    sys.exit(main())
