"""
Tau Command
Per-input |2>-occupancy table for qutrit-based entries.
"""
import argparse
import logging
from typing import List

from tritforge.commands.output import emit_records, table_text
from tritforge.models.pydantic_models import RunConfig, TauRow
from tritforge.utils.decomposition_catalog import CATALOG_IDS, build
from tritforge.utils.error_handlers import EXIT_OK, EXIT_USAGE
from tritforge.utils.verifier import tau_metric

logger = logging.getLogger(__name__)

COLUMNS = ["id", "input", "tau", "tau_max"]


def tau_ids() -> List[str]:
    """Catalog entries the metric applies to: qutrit-only and not iSWAP-based."""
    return [entry_id for entry_id in CATALOG_IDS if build(entry_id).qutrit_based]


def tau_rows(entry_id: str) -> List[TauRow]:
    report = tau_metric(build(entry_id))
    return [
        TauRow(id=entry_id, input=label, tau=value, tau_max=report.tau_max)
        for label, value in sorted(report.per_input.items())
    ]


def run(args: argparse.Namespace) -> int:
    ids = tau_ids() if args.all else args.ids
    if not ids:
        logger.error("No decomposition ids given (use --all for every qutrit-based entry)")
        return EXIT_USAGE
    RunConfig(subcommand="tau", ids=ids, output_format=args.format, out=args.out, seed=args.seed)

    rows: List[TauRow] = []
    for entry_id in ids:
        rows.extend(tau_rows(entry_id))

    emit_records(rows, args.format, args.out,
                 lambda: table_text([r.model_dump() for r in rows], COLUMNS), COLUMNS)
    return EXIT_OK


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("tau", parents=parents, help="|2>-occupancy of Q2 in CNOT units")
    parser.add_argument("ids", nargs="*", help="qutrit-based decomposition ids")
    parser.add_argument("--all", action="store_true", help="every qutrit-based catalog entry, D1S included")
    parser.set_defaults(handler=run)
