"""
Data Export/Import Utilities
Writes report records as JSON or CSV and reads them (and key=value run
configs) back in.

CSV always uses '.' decimals and LF line endings so repeated runs diff
cleanly.
"""
import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Type, Union

import pandas as pd
from dotenv import dotenv_values
from pydantic import BaseModel

from tritforge.utils.error_handlers import ConfigurationError, ExportError

logger = logging.getLogger(__name__)

Record = Dict[str, Any]


def _plain(record: Union[BaseModel, Record]) -> Record:
    if isinstance(record, BaseModel):
        return record.model_dump(mode="json")
    return dict(record)


def _csv_cell(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return value


class DataExporter:
    """
    Data exporter utility.
    Exports record lists to JSON and CSV, to a file or to a string.
    """

    @staticmethod
    def render_json(records: List[Union[BaseModel, Record]]) -> str:
        return json.dumps([_plain(r) for r in records], indent=2, ensure_ascii=False) + "\n"

    @staticmethod
    def render_csv(records: List[Union[BaseModel, Record]], columns: Optional[List[str]] = None) -> str:
        rows = [{k: _csv_cell(v) for k, v in _plain(r).items()} for r in records]
        df = pd.DataFrame(rows, columns=columns)
        buffer = io.StringIO()
        df.to_csv(buffer, index=False, lineterminator="\n", decimal=".")
        return buffer.getvalue()

    @staticmethod
    def _write(text: str, output_path: str, record_count: int) -> Dict[str, Any]:
        path = Path(output_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
        except OSError as e:
            logger.error(f"Error exporting to {output_path}: {e}")
            raise ExportError(output_path, e.strerror or str(e))

        logger.info(f"Exported {record_count} records to {output_path}")
        return {
            "status": "success",
            "record_count": record_count,
            "output_path": output_path,
        }

    @staticmethod
    def export_to_json(records: List[Union[BaseModel, Record]], output_path: str) -> Dict[str, Any]:
        """
        Export records to JSON.

        Args:
            records: Pydantic models or plain dicts
            output_path: File path to save JSON

        Returns:
            Dictionary with export results
        """
        return DataExporter._write(DataExporter.render_json(records), output_path, len(records))

    @staticmethod
    def export_to_csv(records: List[Union[BaseModel, Record]], output_path: str,
                      columns: Optional[List[str]] = None) -> Dict[str, Any]:
        """
        Export records to CSV.

        Args:
            records: Pydantic models or plain dicts
            output_path: File path to save CSV
            columns: Optional column order (and subset)

        Returns:
            Dictionary with export results
        """
        return DataExporter._write(DataExporter.render_csv(records, columns), output_path, len(records))


class DataImporter:
    """
    Data importer utility.
    Reads exported JSON back, optionally re-validating each record.
    """

    @staticmethod
    def import_from_json(file_path: str, model_class: Optional[Type[BaseModel]] = None) -> List[Any]:
        """
        Import records from a JSON file.

        Args:
            file_path: Path to JSON file
            model_class: Pydantic model to validate each record with

        Returns:
            List of dicts, or of model instances when model_class is given
        """
        with open(file_path, "r", encoding="utf-8") as f:
            data = json.load(f)
        if isinstance(data, dict):
            data = [data]
        if model_class is None:
            return data
        records = [model_class.model_validate(item) for item in data]
        logger.info(f"Imported {len(records)} {model_class.__name__} records from {file_path}")
        return records

    @staticmethod
    def import_key_values(file_path: str) -> Dict[str, str]:
        """Read a plain key=value file (same syntax as .env)."""
        path = Path(file_path)
        if not path.is_file():
            raise ConfigurationError(f"Config file not found: {file_path}")
        values = {k: v for k, v in dotenv_values(path).items() if v is not None}
        logger.debug(f"Read {len(values)} settings from {file_path}")
        return values
