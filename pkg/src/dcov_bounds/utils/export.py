"""
Export utilities for reports and campaign results.
"""

import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from ..config.settings import APP_VERSION
from ..core.exceptions import OutputWriteError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class ResultExporter:
    """Handles writing of reports to stdout or files."""

    @staticmethod
    def to_json_text(document: Dict[str, Any]) -> str:
        """
        Serialize a report document.

        Floats use Python's shortest round-tripping repr; keys keep their
        insertion order so repeated runs produce identical bytes.
        """
        return json.dumps(document, indent=2, allow_nan=False) + "\n"

    @staticmethod
    def write_text(text: str, file_path: Optional[PathLike] = None) -> None:
        """
        Write text to ``file_path``, or to stdout when no path is given.

        Args:
            text: Fully formatted output
            file_path: Output file path
        """
        if file_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return
        try:
            with open(file_path, 'w', encoding='utf-8') as f:
                f.write(text)
            logger.info(f"Report written: {file_path}")
        except OSError as e:
            logger.error(f"Failed to write report: {e}")
            raise OutputWriteError(str(file_path), e.strerror or str(e)) from e

    @staticmethod
    def export_to_json(document: Dict[str, Any], file_path: Optional[PathLike] = None) -> None:
        """
        Export a report document as JSON.

        Args:
            document: Report dictionary (e.g. ``CampaignResult.to_dict()``)
            file_path: Output file path, stdout when None
        """
        export_data = {
            "metadata": {"version": APP_VERSION},
            **document,
        }
        ResultExporter.write_text(ResultExporter.to_json_text(export_data), file_path)

    @staticmethod
    def export_to_txt(lines: Sequence[str], file_path: Optional[PathLike] = None) -> None:
        """
        Export a human-readable report.

        Args:
            lines: Report lines without trailing newlines
            file_path: Output file path, stdout when None
        """
        ResultExporter.write_text("".join(f"{line}\n" for line in lines), file_path)

    @staticmethod
    def export_to_csv(rows: List[Dict[str, Any]], file_path: Optional[PathLike] = None) -> None:
        """
        Export table rows as CSV; the first row's keys form the header.

        Args:
            rows: List of row dictionaries sharing the same keys
            file_path: Output file path, stdout when None
        """
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        if rows:
            columns = list(rows[0])
            writer.writerow(columns)
            for row in rows:
                writer.writerow(["" if row[c] is None else row[c] for c in columns])
        ResultExporter.write_text(buffer.getvalue(), file_path)
