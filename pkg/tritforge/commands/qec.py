"""
QEC Command
Runs the measurement-free repetition-code protocol and writes the
per-cycle fidelity report.
"""
import argparse
import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from tritforge.commands.output import emit_records, table_text, write_text
from tritforge.models.pydantic_models import ErrorModel, FidelityReport, ResetChannel, RunConfig
from tritforge.utils.data_export_import import DataExporter, DataImporter
from tritforge.utils.error_handlers import EXIT_OK, ConfigurationError
from tritforge.utils.qec_sim import run_protocol

logger = logging.getLogger(__name__)

COLUMNS = ["cycle", "basis", "error_sites", "theta", "fidelity", "leakage_flag"]

DEFAULTS: Dict[str, Any] = {
    "decomposition": "B3",
    "cycles": 10,
    "theta": None,
    "rotate_site": False,
    "p_error": None,
    "mode": None,
    "axis": "alternating",
    "eps_reset": 0.0,
    "reset_ns": 280.0,
    "eps_cnot": 0.0,
    "psi": [0.6, 0.8],
    "channel": False,
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _bool(key: str, raw: str) -> bool:
    value = raw.strip().lower()
    if value in _TRUE:
        return True
    if value in _FALSE:
        return False
    raise ConfigurationError(f"{key} must be a boolean, got '{raw}'")


def _floats(key: str, raw: str) -> list:
    try:
        return [float(part) for part in raw.replace(";", ",").split(",") if part.strip()]
    except ValueError:
        raise ConfigurationError(f"{key} must be a comma-separated list of numbers, got '{raw}'")


_PARSERS = {
    "decomposition": lambda k, v: v.strip(),
    "cycles": lambda k, v: int(v),
    "theta": _floats,
    "rotate_site": _bool,
    "p_error": lambda k, v: float(v),
    "mode": lambda k, v: v.strip(),
    "axis": lambda k, v: v.strip(),
    "eps_reset": lambda k, v: float(v),
    "reset_ns": lambda k, v: float(v),
    "eps_cnot": lambda k, v: float(v),
    "psi": _floats,
    "channel": _bool,
}


def settings_from_key_values(values: Dict[str, str]) -> Dict[str, Any]:
    """
    Turn a key=value mapping into QEC settings.

    Keys are case-insensitive and may carry a QEC_ prefix
    (QEC_CYCLES=5 and cycles=5 are the same setting).
    """
    settings: Dict[str, Any] = {}
    for raw_key, raw_value in values.items():
        key = raw_key.lower()
        if key.startswith("qec_"):
            key = key[4:]
        parser = _PARSERS.get(key)
        if parser is None:
            raise ConfigurationError(f"Unknown QEC setting '{raw_key}'")
        try:
            settings[key] = parser(raw_key, raw_value)
        except ValueError:
            raise ConfigurationError(f"Invalid value for {raw_key}: '{raw_value}'")
    return settings


def resolve_settings(args: argparse.Namespace) -> Dict[str, Any]:
    """Defaults, then the --config file, then explicit flags."""
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        settings.update(settings_from_key_values(DataImporter.import_key_values(args.config)))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None and value is not False:
            settings[key] = value
    return settings


def error_model_from(settings: Dict[str, Any], seed: int) -> ErrorModel:
    theta = settings["theta"]
    mode = settings["mode"]
    if theta is not None:
        if len(theta) not in (1, 3):
            raise ConfigurationError(f"theta takes one or three angles, got {len(theta)}")
        angles = tuple(theta) if len(theta) == 3 else (theta[0], 0.0, 0.0)
        mode = mode or "fixed_angles"
    else:
        angles = (0.0, 0.0, 0.0)
        if mode is None:
            mode = "random_single" if settings["p_error"] is not None else "fixed_angles"
    return ErrorModel(
        mode=mode,
        angles=angles,
        axis_schedule=settings["axis"],
        p_error=settings["p_error"] or 0.0,
        seed=seed,
        rotate_site=settings["rotate_site"],
    )


def build_run_config(args: argparse.Namespace) -> RunConfig:
    settings = resolve_settings(args)
    if len(settings["psi"]) != 2:
        raise ConfigurationError("psi takes exactly two amplitudes")
    return RunConfig(
        subcommand="qec",
        output_format=args.format,
        out=args.out,
        seed=args.seed,
        decomposition=settings["decomposition"],
        cycles=settings["cycles"],
        psi=tuple(settings["psi"]),
        error_model=error_model_from(settings, args.seed),
        reset=ResetChannel(epsilon_reset=settings["eps_reset"], duration_ns=settings["reset_ns"]),
        eps_cnot=settings["eps_cnot"],
        channel=settings["channel"],
    )


def summary_line(report: FidelityReport) -> str:
    return (f"cycles={report.cycles} mean_fidelity={report.mean_fidelity:.9f} "
            f"min_fidelity={report.min_fidelity:.9f} leakage_events={report.leakage_events}\n")


def write_report(report: FidelityReport, out: str) -> Dict[str, Path]:
    """Write <stem>.json and <stem>.csv next to each other."""
    stem = Path(out).with_suffix("")
    json_path = stem.with_suffix(".json")
    csv_path = stem.with_suffix(".csv")
    write_text(json.dumps(report.model_dump(mode="json"), indent=2) + "\n", str(json_path))
    DataExporter.export_to_csv(report.records, str(csv_path), COLUMNS)
    return {"json": json_path, "csv": csv_path}


def run(args: argparse.Namespace) -> int:
    run_config = build_run_config(args)
    report = run_protocol(
        run_config.psi,
        run_config.cycles,
        decomposition_id=run_config.decomposition,
        model=run_config.error_model,
        reset=run_config.reset,
        mode="channel" if run_config.channel else "trajectory",
        cnot_epsilon=run_config.eps_cnot,
    )

    if args.out:
        paths = write_report(report, args.out)
        logger.info(f"QEC report written to {paths['json']} and {paths['csv']}")
        write_text(summary_line(report), None)
    elif args.format == "json":
        write_text(json.dumps(report.model_dump(mode="json"), indent=2) + "\n", None)
    else:
        def _table() -> str:
            rows = [{
                "cycle": r.cycle,
                "basis": r.basis,
                "error_sites": ",".join(str(s) for s in r.error_sites) or "-",
                "theta": ",".join(f"{t:.4f}" for t in r.theta),
                "fidelity": f"{r.fidelity:.9f}",
                "leakage": "yes" if r.leakage_flag else "no",
            } for r in report.records]
            return table_text(rows) + summary_line(report)

        emit_records(report.records, args.format, None, _table, COLUMNS)
    return EXIT_OK


def register(subparsers, parents) -> None:
    parser = subparsers.add_parser("qec", parents=parents, help="run the measurement-free QEC protocol")
    parser.add_argument("--decomposition", help="incomplete-Toffoli source entry (default B3)")
    parser.add_argument("--cycles", type=int, help="number of QEC cycles (default 10)")
    parser.add_argument("--theta", type=float, nargs="+", metavar="RAD",
                        help="fixed error angles for A1 D A2; a single value hits A1 only")
    parser.add_argument("--rotate-site", action="store_true", help="roll the fixed angles by one site per cycle")
    parser.add_argument("--p-error", type=float, help="per-cycle error probability for random modes")
    parser.add_argument("--mode", choices=["fixed_angles", "random_single", "random_independent"])
    parser.add_argument("--axis", choices=["bit", "phase", "alternating"], help="error axis schedule")
    parser.add_argument("--eps-reset", type=float, help="reset failure probability")
    parser.add_argument("--reset-ns", type=float, help="reset duration in ns")
    parser.add_argument("--eps-cnot", type=float, help="over-rotation of an imperfect central CNOT")
    parser.add_argument("--psi", type=float, nargs=2, metavar=("ALPHA", "BETA"), help="data qubit amplitudes, normalized before use")
    parser.add_argument("--channel", action="store_true", help="exact density-operator simulation")
    parser.add_argument("--config", help="key=value file with QEC settings")
    parser.set_defaults(handler=run)
