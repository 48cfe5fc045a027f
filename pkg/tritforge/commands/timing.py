"""
Timing Command
Prints the measurement-free and measurement-based cycle budgets.
"""
import argparse
import json
import logging

from tritforge.commands.output import write_text
from tritforge.utils.data_export_import import DataExporter
from tritforge.utils.error_handlers import EXIT_OK
from tritforge.utils.timing_model import (
    budget_records,
    mb_budget,
    mf_budget,
    render_table,
    repetition_rate,
    speedup,
)

logger = logging.getLogger(__name__)


def run(args: argparse.Namespace) -> int:
    mf = mf_budget(
        single_gate_ns=args.single_gate_ns,
        two_qutrit_ns=args.two_qutrit_ns,
        exclusive_cnot_ns=args.exclusive_cnot_ns,
        reset_ns=args.reset_ns,
    )
    mb = mb_budget()

    if args.format == "json":
        payload = {
            "mf": mf.model_dump(mode="json"),
            "mb": mb.model_dump(mode="json"),
            "mf_rate_mhz": repetition_rate(mf),
            "mb_rate_mhz": repetition_rate(mb),
            "speedup": speedup(mf, mb),
        }
        write_text(json.dumps(payload, indent=2) + "\n", args.out)
    elif args.format == "csv":
        records = budget_records([mf, mb])
        if args.out:
            DataExporter.export_to_csv(records, args.out)
        else:
            write_text(DataExporter.render_csv(records), None)
    else:
        write_text(render_table(mf, mb), args.out)

    logger.info(f"MF total {mf.total_ns:g} ns, MB total {mb.total_ns:g} ns, speedup {speedup(mf, mb):.3f}")
    return EXIT_OK


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("timing", parents=parents, help="MF vs MB cycle budgets")
    parser.add_argument("--single-gate-ns", type=float, default=30.0)
    parser.add_argument("--two-qutrit-ns", type=float, default=90.0)
    parser.add_argument("--exclusive-cnot-ns", type=float, default=125.0)
    parser.add_argument("--reset-ns", type=float, default=280.0)
    parser.set_defaults(handler=run)
