"""
Time-tag files holding both channels: CSV (time_s, channel) and binary.

Binary layout: header `<4sHQ` (magic b"SBTT", version, count) followed by
packed records of float64 time and uint8 channel.
"""

import struct
from pathlib import Path

import numpy as np

from superbunch.detection.timetags import TimeTagStream
from superbunch.errors import ContractViolation
from superbunch.storage.tables import column, read_table, write_table
from superbunch.utils import format_float

TAG_MAGIC = b"SBTT"
TAG_VERSION = 1
_TAG_HEADER = struct.Struct("<4sHQ")
_RECORD = np.dtype([("time_s", "<f8"), ("channel", "u1")])


def _merge(streams: list[TimeTagStream]) -> np.ndarray:
    records = np.empty(sum(len(s) for s in streams), dtype=_RECORD)
    start = 0
    for s in streams:
        records["time_s"][start:start + len(s)] = s.tags
        records["channel"][start:start + len(s)] = s.channel
        start += len(s)
    return records[np.lexsort((records["channel"], records["time_s"]))]


def _split(times: np.ndarray, channels: np.ndarray, duration: float) -> dict:
    return {ch: TimeTagStream(times[channels == ch], ch, duration) for ch in (1, 2)}


def save_timetags_csv(streams: list[TimeTagStream], path: Path, header: str = None) -> Path:
    records = _merge(streams)
    duration = max(s.duration for s in streams)
    comments = ([header] if header else []) + [f"# duration_s={format_float(duration)}"]
    return write_table(path, ["time_s", "channel"], [records["time_s"], records["channel"].astype(np.int64)], comments)


def load_timetags_csv(path: Path) -> dict:
    """Streams keyed by channel."""
    meta, columns, rows = read_table(path)
    if columns != ["time_s", "channel"]:
        raise ContractViolation(f"{path}: expected columns time_s,channel, got {columns}")
    times = column(columns, rows, "time_s")
    channels = column(columns, rows, "channel", dtype=np.int64)
    duration = float(meta.get("duration_s", times.max() if len(times) else 0.0))
    return _split(times, channels, duration)


def save_timetags_binary(streams: list[TimeTagStream], path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    records = _merge(streams)
    with open(path, "wb") as f:
        f.write(_TAG_HEADER.pack(TAG_MAGIC, TAG_VERSION, len(records)))
        f.write(records.tobytes())
    return path


def load_timetags_binary(path: Path, duration: float = None) -> dict:
    """Streams keyed by channel; duration defaults to the last tag time."""
    with open(path, "rb") as f:
        raw = f.read()
    if len(raw) < _TAG_HEADER.size:
        raise ContractViolation(f"{path}: truncated time-tag header")
    magic, version, count = _TAG_HEADER.unpack_from(raw)
    if magic != TAG_MAGIC or version != TAG_VERSION:
        raise ContractViolation(f"{path}: not a version-{TAG_VERSION} time-tag file")
    records = np.frombuffer(raw, dtype=_RECORD, count=count, offset=_TAG_HEADER.size)
    times = records["time_s"].astype(np.float64)
    channels = records["channel"].astype(np.int64)
    if duration is None:
        duration = float(times.max()) if len(times) else 0.0
    return _split(times, channels, duration)
