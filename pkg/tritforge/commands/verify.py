"""
Verify Command
Runs each requested entry's checks and reports one line per entry.
"""
import argparse
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional

from tritforge.commands.output import emit_records, table_text
from tritforge.config.environment import config
from tritforge.models.pydantic_models import RunConfig, VerifyRecord
from tritforge.utils.decomposition_catalog import CATALOG_IDS, INCOMPLETE_IDS, DecompositionEntry, build, incomplete
from tritforge.utils.error_handlers import EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE
from tritforge.utils.verifier import declared_behavior_check, toffoli_equivalence

logger = logging.getLogger(__name__)

COLUMNS = ["id", "check", "toffoli_equivalent", "matches_declared", "status",
           "global_phase", "max_deviation", "leakage_norm"]


def verify_entry(entry: DecompositionEntry, tolerance: Optional[float] = None) -> VerifyRecord:
    """
    Check an entry against its declared behaviour.

    PASS means the entry does what it declares: Toffoli for ordinary
    entries, the declared non-Toffoli action for expected negatives.
    """
    declared = declared_behavior_check(entry, tolerance)
    if entry.complete:
        toffoli = toffoli_equivalence(entry, tolerance).equivalent
        passed = declared.equivalent and toffoli == entry.toffoli_equivalent
    else:
        toffoli = False
        passed = declared.equivalent
    logger.debug(f"verify {entry.id}: declared={declared.equivalent} toffoli={toffoli}")
    return VerifyRecord(
        id=entry.id,
        check="toffoli" if entry.complete else "incomplete",
        toffoli_equivalent=toffoli,
        matches_declared=declared.equivalent,
        status="PASS" if passed else "FAIL",
        global_phase=declared.global_phase,
        max_deviation=declared.max_deviation,
        leakage_norm=declared.leakage_norm,
    )


def _table(records: List[VerifyRecord]) -> str:
    rows = [{
        "id": r.id,
        "check": r.check,
        "toffoli": "PASS" if r.toffoli_equivalent else "FAIL",
        "declared": "PASS" if r.matches_declared else "FAIL",
        "status": r.status,
        "phase": f"{r.global_phase:.3f}",
        "max_dev": f"{r.max_deviation:.2e}",
        "leakage": f"{r.leakage_norm:.2e}",
    } for r in records]
    return table_text(rows)


def run(args: argparse.Namespace) -> int:
    ids = list(CATALOG_IDS) if args.all else args.ids
    if args.incomplete and args.all:
        ids = [i for i in ids if i in INCOMPLETE_IDS]
    if not ids:
        logger.error("No decomposition ids given (use --all for the whole catalog)")
        return EXIT_USAGE
    RunConfig(subcommand="verify", ids=ids, output_format=args.format, out=args.out,
              seed=args.seed, tolerance=args.tolerance)

    loader = incomplete if args.incomplete else build

    def _one(entry_id: str) -> VerifyRecord:
        return verify_entry(loader(entry_id), args.tolerance)

    # map keeps catalog order regardless of completion order
    with ThreadPoolExecutor(max_workers=config.WORKERS) as pool:
        records = list(pool.map(_one, ids))

    emit_records(records, args.format, args.out, lambda: _table(records), COLUMNS)
    failed = [r.id for r in records if r.status == "FAIL"]
    if failed:
        logger.error(f"Verification failed for: {', '.join(failed)}")
        return EXIT_CHECK_FAILED
    logger.info(f"Verified {len(records)} entries")
    return EXIT_OK


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("verify", parents=parents, help="verify catalog entries")
    parser.add_argument("ids", nargs="*", help="decomposition ids")
    parser.add_argument("--all", action="store_true", help="verify the whole catalog")
    parser.add_argument("--incomplete", action="store_true", help="verify the incomplete variants instead")
    parser.set_defaults(handler=run)
