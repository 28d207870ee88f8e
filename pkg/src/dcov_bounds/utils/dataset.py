"""
CSV ingestion of paired samples.

Dialect: one delimiter (comma by default), optional header row, decimal
point only. Cells are parsed without locale rules; digit separators such as
``1_000`` or ``1,5`` are rejected rather than guessed at.
"""

import csv
import logging
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

from ..config.settings import DEFAULT_DELIMITER, MACHINE_DIGITS
from ..core.exceptions import (
    DatasetParseError,
    EmptySampleError,
    NonFiniteEntryError,
    OutputWriteError,
    SizeMismatchError,
)
from ..core.sample import SampleMatrix, validate_sample

logger = logging.getLogger(__name__)

_NUMBER = re.compile(r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?", re.ASCII)
_NON_FINITE = re.compile(r"[+-]?(?:nan|inf|infinity)", re.ASCII | re.IGNORECASE)
_RANGE = re.compile(r"([0-9]+)-([0-9]+)", re.ASCII)


@dataclass(frozen=True)
class DatasetFile:
    """
    A CSV file plus the roles of its columns.

    Column references are zero-based indices, ``a-b`` index ranges
    (inclusive) or, when the file has a header, column names.
    """

    path: Path
    x_cols: Tuple[str, ...]
    y_cols: Tuple[str, ...]
    header: bool = False
    delimiter: str = DEFAULT_DELIMITER

    def __post_init__(self) -> None:
        object.__setattr__(self, "path", Path(self.path))
        if not self.x_cols or not self.y_cols:
            raise DatasetParseError("X and Y column selections must both be non-empty")
        if len(self.delimiter) != 1:
            raise DatasetParseError(f"delimiter must be one character, got {self.delimiter!r}")


def parse_column_list(text: str) -> Tuple[str, ...]:
    """Split a ``--x-cols`` style argument ("0,2-4,name") into references."""
    return tuple(token.strip() for token in text.split(",") if token.strip())


def parse_cell(cell: str, line: int, column: int) -> float:
    """
    Parse one CSV cell as a real number.

    Raises:
        DatasetParseError: the cell is not a decimal number (or nan/inf).
    """
    text = cell.strip()
    if _NUMBER.fullmatch(text) or _NON_FINITE.fullmatch(text):
        return float(text)
    raise DatasetParseError(f"cell {cell!r} is not a number", line=line, column=column, cell=cell)


def _resolve(refs: Sequence[str], names: Optional[List[str]]) -> List[int]:
    index_of: Dict[str, int] = {name.strip(): i for i, name in enumerate(names or [])}
    columns: List[int] = []
    for ref in refs:
        match = _RANGE.fullmatch(ref)
        if ref.isdigit():
            columns.append(int(ref))
        elif match:
            start, stop = int(match.group(1)), int(match.group(2))
            if start > stop:
                raise DatasetParseError(f"empty column range {ref!r}")
            columns.extend(range(start, stop + 1))
        elif ref in index_of:
            columns.append(index_of[ref])
        else:
            raise DatasetParseError(f"unknown column {ref!r}")
    return columns


def resolve_columns(dataset: DatasetFile,
                    names: Optional[List[str]] = None) -> Tuple[List[int], List[int]]:
    """Column indices of X and Y; raises DatasetParseError if they overlap."""
    x_cols = _resolve(dataset.x_cols, names)
    y_cols = _resolve(dataset.y_cols, names)
    overlap = sorted(set(x_cols) & set(y_cols))
    if overlap:
        raise DatasetParseError(f"columns {overlap} are selected for both X and Y")
    return x_cols, y_cols


def load_dataset(dataset: DatasetFile) -> Tuple[SampleMatrix, SampleMatrix]:
    """
    Read the X and Y samples from a CSV file.

    Raises:
        DatasetParseError: unreadable file, bad column roles, short rows or
            non-numeric cells (with line/column).
        EmptySampleError: no data rows.
        NonFiniteEntryError: a selected cell is NaN or infinite.
    """
    try:
        with open(dataset.path, "r", newline="", encoding="utf-8") as f:
            rows = list(_numbered_rows(f, dataset.delimiter))
    except OSError as e:
        raise DatasetParseError(f"cannot read {dataset.path}: {e}") from e
    except (csv.Error, UnicodeDecodeError) as e:
        raise DatasetParseError(f"{dataset.path} is not a readable CSV file: {e}") from e

    names = None
    if dataset.header:
        if not rows:
            raise EmptySampleError(f"{dataset.path} has no header row")
        names = rows[0][1]
        rows = rows[1:]

    x_cols, y_cols = resolve_columns(dataset, names)
    needed = max(x_cols + y_cols) + 1

    x_rows: List[List[float]] = []
    y_rows: List[List[float]] = []
    for line, row in rows:
        if len(row) < needed:
            raise DatasetParseError(
                f"row has {len(row)} fields but column {needed - 1} is selected", line=line
            )
        values = {c: parse_cell(row[c], line, c) for c in x_cols + y_cols}
        for c, value in values.items():
            if not math.isfinite(value):
                raise NonFiniteEntryError(len(x_rows), c, value)
        x_rows.append([values[c] for c in x_cols])
        y_rows.append([values[c] for c in y_cols])

    if not x_rows:
        raise EmptySampleError(f"{dataset.path} has no data rows")

    logger.info(f"Loaded {len(x_rows)} rows from {dataset.path}")
    return validate_sample(x_rows), validate_sample(y_rows)


def _numbered_rows(f: TextIO, delimiter: str) -> Iterator[Tuple[int, List[str]]]:
    reader = csv.reader(f, delimiter=delimiter)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        yield reader.line_num, row


def format_value(value: float, digits: int = MACHINE_DIGITS) -> str:
    """``digits`` significant digits; 17 reproduces any double exactly."""
    return format(value, f".{digits}g")


def write_sample_csv(path: Union[str, Path], x: SampleMatrix, y: SampleMatrix,
                     delimiter: str = DEFAULT_DELIMITER) -> DatasetFile:
    """
    Write a paired sample with a header row and return how to read it back.

    Values carry 17 significant digits so that re-ingestion is bit-exact.
    """
    if x.n != y.n:
        raise SizeMismatchError(f"x has {x.n} observations but y has {y.n}")
    x_names = [f"x{j}" for j in range(x.dim)]
    y_names = [f"y{j}" for j in range(y.dim)]
    try:
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, delimiter=delimiter)
            writer.writerow(x_names + y_names)
            for x_row, y_row in zip(x.data, y.data):
                writer.writerow(
                    [format_value(v) for v in x_row] + [format_value(v) for v in y_row]
                )
    except OSError as e:
        raise OutputWriteError(str(path), e.strerror or str(e)) from e
    logger.info(f"Sample written to CSV: {path}")
    return DatasetFile(
        path=Path(path),
        x_cols=tuple(x_names),
        y_cols=tuple(y_names),
        header=True,
        delimiter=delimiter,
    )
