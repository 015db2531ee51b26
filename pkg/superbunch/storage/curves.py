"""
Curve, histogram and fit artifacts.
"""

import json
from pathlib import Path

import numpy as np

from superbunch.config import logger
from superbunch.detection.histogram import CoincidenceHistogram
from superbunch.errors import ContractViolation
from superbunch.fitting.models import FitResult
from superbunch.fitting.product import ProductCheck
from superbunch.storage.tables import column, read_table, write_table
from superbunch.types import G2Curve
from superbunch.utils import format_float


def save_curve_csv(curve: G2Curve, path: Path, header: str = None) -> Path:
    """G2Curve as lag_s,value,stderr."""
    path = write_table(path, ["lag_s", "value", "stderr"], [curve.lags, curve.values, curve.stderr],
                       [header] if header else None)
    logger.info(f"Saved curve '{curve.label}' to {path}")
    return path


def load_curve_csv(path: Path) -> G2Curve:
    _, columns, rows = read_table(path)
    if columns != ["lag_s", "value", "stderr"]:
        raise ContractViolation(f"{path}: expected columns lag_s,value,stderr, got {columns}")
    return G2Curve(
        lags=column(columns, rows, "lag_s"),
        values=column(columns, rows, "value"),
        stderr=column(columns, rows, "stderr"),
        label=Path(path).stem,
    )


def save_histogram_csv(histogram: CoincidenceHistogram, path: Path, header: str = None) -> Path:
    comments = [header] if header else []
    comments.append(
        f"# duration_s={format_float(histogram.duration)} counts_ch1={histogram.counts_ch1} "
        f"counts_ch2={histogram.counts_ch2} bin_width_s={format_float(histogram.bin_width)}"
    )
    return write_table(path, ["lag_s", "counts"], [histogram.lags, histogram.counts], comments)


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    return str(value)


def save_report(entries: dict, path: Path, header: str = None) -> Path:
    """Structured text, one `key: value` line per entry."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        if header:
            f.write(header + "\n")
        for key, value in entries.items():
            f.write(f"{key}: {_format_value(value)}\n")
    logger.info(f"Saved report to {path}")
    return path


def load_report(path: Path) -> dict:
    """Parse a key: value report back into Python values (numbers and lists as JSON)."""
    entries = {}
    with open(path) as f:
        for line in f:
            if line.startswith("#") or ":" not in line:
                continue
            key, raw = line.split(":", 1)
            raw = raw.strip()
            try:
                entries[key.strip()] = json.loads(raw)
            except json.JSONDecodeError:
                entries[key.strip()] = raw
    return entries


def save_fit_result(fit: FitResult, path: Path, header: str = None) -> Path:
    return save_report(fit.to_dict(), path, header)


def save_fit_residuals(fit: FitResult, curve: G2Curve, path: Path, header: str = None) -> Path:
    """CSV lag_s,data,model,residual."""
    model = np.asarray(fit.evaluate(curve.lags))
    return write_table(path, ["lag_s", "data", "model", "residual"],
                       [curve.lags, curve.values, model, curve.values - model],
                       [header] if header else None)


def save_product_check(check: ProductCheck, csv_path: Path, report_path: Path, header: str = None) -> tuple[Path, Path]:
    data = check.product + check.residuals
    write_table(csv_path, ["lag_s", "data", "model", "residual"],
                [check.lags, data, check.product, check.residuals],
                [header] if header else None)
    save_report(check.report, report_path, header)
    return Path(csv_path), Path(report_path)
