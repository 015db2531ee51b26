"""Artifact readers and writers for traces, time tags, curves and fits."""

from superbunch.storage.curves import (
    load_curve_csv,
    load_report,
    save_curve_csv,
    save_fit_residuals,
    save_fit_result,
    save_histogram_csv,
    save_product_check,
    save_report,
)
from superbunch.storage.tables import (
    read_table,
    write_table,
)
from superbunch.storage.timetags import (
    load_timetags_binary,
    load_timetags_csv,
    save_timetags_binary,
    save_timetags_csv,
)
from superbunch.storage.traces import (
    load_trace_binary,
    load_trace_csv,
    save_trace_binary,
    save_trace_csv,
)

__all__ = [
    # Curves and fits
    "load_curve_csv",
    "load_report",
    "save_curve_csv",
    "save_fit_residuals",
    "save_fit_result",
    "save_histogram_csv",
    "save_product_check",
    "save_report",
    # Tables
    "read_table",
    "write_table",
    # Time tags
    "load_timetags_binary",
    "load_timetags_csv",
    "save_timetags_binary",
    "save_timetags_csv",
    # Traces
    "load_trace_binary",
    "load_trace_csv",
    "save_trace_binary",
    "save_trace_csv",
]
