"""
Catalog Commands
`list` shows catalog metadata; `dump` prints one entry in the circuit
text format.
"""
import argparse
import logging

from tritforge.commands.output import emit_records, table_text, write_text
from tritforge.models.pydantic_models import RunConfig
from tritforge.utils.circuit_serialization import circuit_to_text
from tritforge.utils.decomposition_catalog import build, incomplete, list_catalog
from tritforge.utils.error_handlers import EXIT_OK

logger = logging.getLogger(__name__)

COLUMNS = ["id", "flags", "expected_two_site_count", "complete"]


def run_list(args: argparse.Namespace) -> int:
    listings = list_catalog()

    def _table() -> str:
        rows = [{**item.model_dump(), "flags": ",".join(item.flags) or "-"} for item in listings]
        return table_text(rows, COLUMNS)

    emit_records(listings, args.format, args.out, _table, COLUMNS)
    return EXIT_OK


def run_dump(args: argparse.Namespace) -> int:
    RunConfig(subcommand="dump", ids=[args.id], out=args.out, seed=args.seed)
    entry = incomplete(args.id) if args.incomplete else build(args.id)
    comment = f"{entry.id} ({'complete' if entry.complete else 'incomplete'}, {entry.circuit.two_site_count()} two-site gates)"
    if entry.notes:
        comment += f"\n{entry.notes}"
    write_text(circuit_to_text(entry.circuit, comment), args.out)
    return EXIT_OK


def register(subparsers, parents) -> None:
    list_parser = subparsers.add_parser("list", parents=parents, help="list catalog entries")
    list_parser.set_defaults(handler=run_list)

    dump_parser = subparsers.add_parser("dump", parents=parents, help="print an entry's circuit")
    dump_parser.add_argument("id", help="decomposition id")
    dump_parser.add_argument("--incomplete", action="store_true", help="dump the truncated variant")
    dump_parser.set_defaults(handler=run_dump)
