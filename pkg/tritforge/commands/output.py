"""
Command Output
Shared emission of records as an aligned table, JSON or CSV, either to
stdout or to the --out path.
"""
import logging
import sys
from pathlib import Path
from typing import Any, Callable, List, Optional

import pandas as pd

from tritforge.utils.data_export_import import DataExporter
from tritforge.utils.error_handlers import ExportError

logger = logging.getLogger(__name__)


def table_text(rows: List[dict], columns: Optional[List[str]] = None) -> str:
    if not rows:
        return "(no rows)\n"
    return pd.DataFrame(rows, columns=columns).to_string(index=False) + "\n"


def write_text(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise ExportError(out, e.strerror or str(e))
    logger.info(f"Wrote {len(text)} characters to {out}")


def emit_records(records: List[Any], output_format: str, out: Optional[str],
                 table: Callable[[], str], columns: Optional[List[str]] = None) -> None:
    """Write records in the requested format; `table` renders the human view."""
    if output_format == "json":
        if out:
            DataExporter.export_to_json(records, out)
        else:
            write_text(DataExporter.render_json(records), None)
    elif output_format == "csv":
        if out:
            DataExporter.export_to_csv(records, out, columns)
        else:
            write_text(DataExporter.render_csv(records, columns), None)
    else:
        write_text(table(), out)
