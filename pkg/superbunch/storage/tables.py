"""
Plain CSV tables with leading `#` comment lines.
"""

import csv
from pathlib import Path

import numpy as np

from superbunch.config import logger
from superbunch.errors import ContractViolation
from superbunch.utils import format_float


def write_table(path: Path, columns: list[str], data: list, comments: list[str] = None) -> Path:
    """
    Write columns of numbers as CSV.

    Floats use 17 significant digits; integer arrays are written as integers.
    Each comment line is written verbatim and should start with '#'.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = [np.asarray(col) for col in data]
    formatters = [
        (lambda v: str(int(v))) if np.issubdtype(a.dtype, np.integer) else format_float
        for a in arrays
    ]
    with open(path, "w", newline="") as f:
        for line in comments or []:
            f.write(line.rstrip("\n") + "\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in zip(*arrays):
            writer.writerow([fmt(v) for fmt, v in zip(formatters, row)])
    logger.debug(f"Wrote {path} ({len(arrays[0]) if arrays else 0} rows)")
    return path


def parse_comments(lines: list[str]) -> dict:
    """Collect key=value tokens from comment lines."""
    meta = {}
    for line in lines:
        for token in line.lstrip("#").split():
            if "=" in token:
                key, value = token.split("=", 1)
                meta[key] = value
    return meta


def read_table(path: Path) -> tuple[dict, list[str], list[list[str]]]:
    """Return (comment metadata, column names, rows of strings)."""
    comments, rows, columns = [], [], None
    try:
        with open(path, newline="") as f:
            for line in f:
                if line.startswith("#"):
                    comments.append(line)
                    continue
                if columns is None:
                    columns = next(csv.reader([line]))
                    continue
                if line.strip():
                    rows.append(next(csv.reader([line])))
    except (UnicodeDecodeError, csv.Error) as e:
        raise ContractViolation(f"{path}: not a text table ({e})") from e
    return parse_comments(comments), columns or [], rows


def column(columns: list[str], rows: list[list[str]], name: str, dtype=np.float64) -> np.ndarray:
    if name not in columns:
        raise ContractViolation(f"missing column '{name}' in {columns}")
    index = columns.index(name)
    try:
        return np.array([dtype(r[index]) for r in rows], dtype=dtype)
    except (ValueError, IndexError) as e:
        raise ContractViolation(f"column '{name}': unparseable row ({e})") from e
