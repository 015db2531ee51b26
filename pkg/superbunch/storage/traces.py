"""
Intensity trace files: CSV (time_s, intensity) and a little-endian binary layout.

Binary layout: header `<4sHdQ` (magic b"SBIT", version, dt, count) followed by
`count` float64 samples.
"""

import struct
from pathlib import Path

import numpy as np

from superbunch.errors import ContractViolation
from superbunch.speckle.fields import IntensityTrace
from superbunch.storage.tables import column, read_table, write_table
from superbunch.utils import format_float

TRACE_MAGIC = b"SBIT"
TRACE_VERSION = 1
_TRACE_HEADER = struct.Struct("<4sHdQ")


def save_trace_csv(trace: IntensityTrace, path: Path, header: str = None) -> Path:
    comments = ([header] if header else []) + [f"# dt_s={format_float(trace.dt)}"]
    return write_table(path, ["time_s", "intensity"], [trace.times, trace.samples], comments)


def load_trace_csv(path: Path) -> IntensityTrace:
    meta, columns, rows = read_table(path)
    if columns != ["time_s", "intensity"]:
        raise ContractViolation(f"{path}: expected columns time_s,intensity, got {columns}")
    if "dt_s" not in meta:
        raise ContractViolation(f"{path}: missing dt_s comment")
    return IntensityTrace(dt=float(meta["dt_s"]), samples=column(columns, rows, "intensity"))


def save_trace_binary(trace: IntensityTrace, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as f:
        f.write(_TRACE_HEADER.pack(TRACE_MAGIC, TRACE_VERSION, trace.dt, len(trace.samples)))
        f.write(trace.samples.astype("<f8").tobytes())
    return path


def load_trace_binary(path: Path) -> IntensityTrace:
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _TRACE_HEADER.size:
        raise ContractViolation(f"{path}: truncated trace header")
    magic, version, dt, count = _TRACE_HEADER.unpack_from(raw)
    if magic != TRACE_MAGIC or version != TRACE_VERSION:
        raise ContractViolation(f"{path}: not a version-{TRACE_VERSION} trace file")
    payload = np.frombuffer(raw, dtype="<f8", count=count, offset=_TRACE_HEADER.size)
    return IntensityTrace(dt=dt, samples=payload.astype(np.float64))
