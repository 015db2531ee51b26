"""
Pipeline orchestration: wires the analytic, Monte Carlo, synthesis, detection
and fitting modules into reproducible runs that write plot-ready artifacts.
"""

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from superbunch.analytics.coherence import analytic_curve, finite_mode_g2_zero, g2_zero, lag_grid
from superbunch.config import logger
from superbunch.detection.histogram import coincidence_histogram, dark_count_dilution, normalize_histogram
from superbunch.detection.timetags import sample_timetags
from superbunch.errors import ConfigError, ContractViolation, NumericalError
from superbunch.fitting.models import FitResult, fit_g2
from superbunch.fitting.product import product_curve_check
from superbunch.paths.montecarlo import g2_mc_curve
from superbunch.pipeline.experiment import ExperimentConfig
from superbunch.speckle.fields import IntensityTrace, cascade_intensity_trace
from superbunch.speckle.statistics import correlate
from superbunch.storage.curves import (
    load_curve_csv,
    save_curve_csv,
    save_fit_residuals,
    save_fit_result,
    save_histogram_csv,
    save_product_check,
    save_report,
)
from superbunch.storage.timetags import save_timetags_binary, save_timetags_csv
from superbunch.storage.traces import save_trace_binary, save_trace_csv
from superbunch.types import CascadeSpec, G2Curve
from superbunch.utils import ensure_directories, output_header, stream_seed

MODES = ("analytic", "paths-mc", "cascade", "detect", "fit", "fig4", "crosscheck")

DETECTION_STREAM = 4
CROSSCHECK_SIGMA = 3.0

# (name, rotation flags of the two stages, fit model)
FIG4_SCENARIOS = (
    ("a", (False, True), "single"),
    ("b", (True, False), "single"),
    ("c", (True, True), None),
)


@dataclass
class RunContext:
    """Resolved config plus the output directory and artifact header of one run."""

    config: ExperimentConfig
    workers: int = None
    artifacts: list = field(default_factory=list)

    @property
    def header(self) -> str:
        return output_header(self.config.digest, self.config.seed)

    @property
    def spec(self) -> CascadeSpec:
        return self.config.cascade

    def path(self, name: str) -> Path:
        return self.config.output_dir / name

    def record(self, *paths) -> None:
        self.artifacts.extend(Path(p) for p in paths)


def _require_rotating(spec: CascadeSpec, mode: str) -> None:
    if spec.n_effective == 0:
        raise ContractViolation(f"mode '{mode}' needs at least one rotating stage")


def _lags(ctx: RunContext) -> np.ndarray:
    sim = ctx.config.simulation
    return lag_grid(ctx.spec, sim["n_lags"], sim["lag_span"])


def _synthesize(ctx: RunContext, spec: CascadeSpec, label: str) -> IntensityTrace:
    sim = ctx.config.simulation
    trace = cascade_intensity_trace(spec, sim["duration"], sim["dt"], sim["modes"], ctx.config.seed)
    trace.label = label
    return trace


def _export_trace(ctx: RunContext, trace: IntensityTrace, stem: str) -> None:
    if not ctx.config.outputs["export_raw"]:
        return
    if ctx.config.outputs["format"] == "binary":
        ctx.record(save_trace_binary(trace, ctx.path(f"{stem}_trace.bin")))
    else:
        ctx.record(save_trace_csv(trace, ctx.path(f"{stem}_trace.csv"), ctx.header))


def _export_tags(ctx: RunContext, streams, stem: str) -> None:
    if not ctx.config.outputs["export_raw"]:
        return
    if ctx.config.outputs["format"] == "binary":
        ctx.record(save_timetags_binary(list(streams), ctx.path(f"{stem}_timetags.bin")))
    else:
        ctx.record(save_timetags_csv(list(streams), ctx.path(f"{stem}_timetags.csv"), ctx.header))


def _detect_curve(ctx: RunContext, trace: IntensityTrace, stem: str, dark_rate: float = None,
                  scenario: int = 0) -> G2Curve:
    """Time tags, coincidence histogram and normalized curve for one trace."""
    det = ctx.config.detection
    dark = det["dark_rate"] if dark_rate is None else dark_rate
    s1, s2 = sample_timetags(
        trace,
        mean_rate=det["mean_rate"],
        split_ratio=det["split_ratio"],
        dead_time=det["dead_time"],
        dark_rate=dark,
        seed=stream_seed(ctx.config.seed, DETECTION_STREAM, scenario),
    )
    _export_tags(ctx, (s1, s2), stem)
    histogram = coincidence_histogram(s1, s2, det["bin_width"], det["max_lag"])
    ctx.record(save_histogram_csv(histogram, ctx.path(f"{stem}_histogram.csv"), ctx.header))
    curve = normalize_histogram(histogram, ctx.config.fit["baseline_window"], trace.coherence_time)
    curve.label = stem
    curve.metadata.update({"dark_rate": dark, "counts_ch1": len(s1), "counts_ch2": len(s2)})
    ctx.record(save_curve_csv(curve, ctx.path(f"{stem}_curve.csv"), ctx.header))
    return curve


def _fit_and_save(ctx: RunContext, curve: G2Curve, model: str, stem: str) -> FitResult:
    result = fit_g2(curve, model, seed=ctx.config.seed)
    ctx.record(
        save_fit_result(result, ctx.path(f"{stem}_fit.txt"), ctx.header),
        save_fit_residuals(result, curve, ctx.path(f"{stem}_residuals.csv"), ctx.header),
    )
    logger.info(f"Fit {stem} ({model}): g2(0) = {result.g2_zero:.4f} +/- {result.g2_zero_stderr:.4f}")
    return result


def _comparison(name: str, estimate: G2Curve, reference: G2Curve) -> dict:
    residual = estimate.values - reference.values
    variance = estimate.stderr**2 + reference.stderr**2
    rms = float(np.sqrt(np.mean(residual**2)))
    pooled = float(np.sqrt(np.mean(variance)))
    return {
        f"{name}_rms_gap": rms,
        f"{name}_pooled_stderr": pooled,
        f"{name}_consistent": bool(rms <= CROSSCHECK_SIGMA * pooled),
    }


# Modes

def run_analytic(ctx: RunContext) -> dict:
    curve = analytic_curve(ctx.spec, _lags(ctx))
    ctx.record(save_curve_csv(curve, ctx.path("analytic_curve.csv"), ctx.header))
    return {"g2_zero": g2_zero(ctx.spec.n_effective), "n_effective": ctx.spec.n_effective}


def run_paths_mc(ctx: RunContext) -> dict:
    sim = ctx.config.simulation
    curve = g2_mc_curve(ctx.spec, _lags(ctx), sim["realizations"], ctx.config.seed, workers=ctx.workers)
    ctx.record(save_curve_csv(curve, ctx.path("paths_mc_curve.csv"), ctx.header))
    return {"g2_zero": curve.peak()}


def run_cascade(ctx: RunContext) -> dict:
    _require_rotating(ctx.spec, "cascade")
    sim = ctx.config.simulation
    trace = _synthesize(ctx, ctx.spec, "cascade")
    _export_trace(ctx, trace, "cascade")
    curve = correlate(trace, sim["lag_span"] * ctx.spec.max_coherence_time, sim["n_lags"], seed=ctx.config.seed)
    ctx.record(save_curve_csv(curve, ctx.path("cascade_curve.csv"), ctx.header))
    return {
        "g2_zero": curve.peak(),
        "finite_mode_expectation": finite_mode_g2_zero(sim["modes"], ctx.spec.n_effective),
    }


def run_detect(ctx: RunContext) -> dict:
    _require_rotating(ctx.spec, "detect")
    trace = _synthesize(ctx, ctx.spec, "detect")
    _export_trace(ctx, trace, "detect")
    curve = _detect_curve(ctx, trace, "detect")
    return {"g2_zero": curve.value_at(0.0), "counts_ch1": curve.metadata["counts_ch1"],
            "counts_ch2": curve.metadata["counts_ch2"]}


def run_fit(ctx: RunContext, curve_path: Path = None) -> dict:
    """Fit a curve file, or the detect-mode curve when none is given."""
    if curve_path is not None:
        if not Path(curve_path).exists():
            raise ConfigError("--curve", f"file not found: {curve_path}")
        curve = load_curve_csv(curve_path)
        logger.info(f"Fitting {len(curve.lags)} points from {curve_path}")
    else:
        _require_rotating(ctx.spec, "fit")
        curve = _detect_curve(ctx, _synthesize(ctx, ctx.spec, "detect"), "detect")
    result = _fit_and_save(ctx, curve, ctx.config.fit["model"], "fit")
    low, high = result.g2_zero_interval()
    return {"g2_zero": result.g2_zero, "g2_zero_stderr": result.g2_zero_stderr,
            "g2_zero_interval": [low, high]}


def run_fig4(ctx: RunContext) -> dict:
    """
    Three scenarios of a two-stage cascade: (a) stage 1 static, (b) stage 2
    static, (c) both rotating, plus a dark-count variant of (c) on the same
    trace and detection streams.
    """
    if len(ctx.spec.stages) != 2:
        raise ContractViolation(f"fig4 needs exactly two stages, got {len(ctx.spec.stages)}")
    det = ctx.config.detection
    curves, fits = {}, {}

    for index, (name, flags, model) in enumerate(FIG4_SCENARIOS):
        spec = ctx.spec.with_rotation(flags)
        logger.info(f"=== fig4 scenario ({name}): rotating={list(flags)} ===")
        trace = _synthesize(ctx, spec, f"fig4_{name}")
        _export_trace(ctx, trace, f"fig4_{name}")
        curves[name] = _detect_curve(ctx, trace, f"fig4_{name}", scenario=index)
        fits[name] = _fit_and_save(ctx, curves[name], model or ctx.config.fit["model"], f"fig4_{name}")
        if name == "c":
            if model is None and ctx.config.fit["model"] != "single":
                fits["c_single"] = _fit_and_save(ctx, curves[name], "single", "fig4_c_single")
            signal = det["split_ratio"] * det["mean_rate"]
            dark_rate = ctx.config.fit["dark_fraction"] * signal
            logger.info(f"=== fig4 scenario (c) with dark counts: {dark_rate:g}/s per channel ===")
            curves["c_dark"] = _detect_curve(ctx, trace, "fig4_c_dark", dark_rate=dark_rate, scenario=index)
            fits["c_dark"] = _fit_and_save(ctx, curves["c_dark"], ctx.config.fit["model"], "fig4_c_dark")

    check = product_curve_check(curves["a"], curves["b"], curves["c"], fits["a"], fits["b"])
    ctx.record(*save_product_check(check, ctx.path("fig4_product.csv"), ctx.path("fig4_product_report.txt"),
                                   ctx.header))

    dilution = dark_count_dilution(det["split_ratio"] * det["mean_rate"],
                                   ctx.config.fit["dark_fraction"] * det["split_ratio"] * det["mean_rate"])
    summary = {f"{name}_g2_zero": fit.g2_zero for name, fit in fits.items()}
    summary.update({f"{name}_g2_zero_stderr": fit.g2_zero_stderr for name, fit in fits.items()})
    summary["c_dark_expected_g2_zero"] = 1.0 + (fits["c"].g2_zero - 1.0) * dilution
    summary["product_rms_gap"] = check.rms_gap
    summary["product_pooled_stderr"] = check.pooled_stderr
    summary["product_sign_pattern"] = check.report["sign_pattern"]
    return summary


def run_crosscheck(ctx: RunContext) -> dict:
    """Compare every estimator of the same g2 curve against the exact result."""
    _require_rotating(ctx.spec, "crosscheck")
    sim = ctx.config.simulation
    span = sim["lag_span"] * ctx.spec.max_coherence_time
    lags = _lags(ctx)

    mc = g2_mc_curve(ctx.spec, lags, sim["realizations"], ctx.config.seed, workers=ctx.workers)
    trace = _synthesize(ctx, ctx.spec, "crosscheck")
    cascade = correlate(trace, span, sim["n_lags"], seed=ctx.config.seed)
    detect = _detect_curve(ctx, trace, "crosscheck_detect")
    detect = detect.resample(detect.lags[np.abs(detect.lags) <= span])

    report = {}
    for name, curve in (("paths_mc", mc), ("cascade", cascade), ("detect", detect)):
        ctx.record(save_curve_csv(curve, ctx.path(f"crosscheck_{name}_curve.csv"), ctx.header))
        report.update(_comparison(name, curve, analytic_curve(ctx.spec, curve.lags)))
    report["consistent"] = all(v for k, v in report.items() if k.endswith("_consistent"))
    ctx.record(save_report(report, ctx.path("crosscheck_report.txt"), ctx.header))
    if not report["consistent"]:
        raise NumericalError("estimators disagree beyond 3 pooled standard errors", diagnostics=report)
    return report


def run_pipeline(config: ExperimentConfig, mode: str, workers: int = None, curve_path: Path = None) -> dict:
    """
    Run one pipeline mode and write its artifacts under config.outputs.directory.

    Args:
        config: Resolved experiment configuration
        mode: One of MODES
        workers: Monte Carlo worker count; never changes any output
        curve_path: Curve CSV for the fit mode

    Returns:
        Summary dict with "status", "mode", "artifacts" and mode-specific values.
        The summary is also written to <mode>_summary.txt.
    """
    if mode not in MODES:
        raise ContractViolation(f"unknown mode '{mode}', expected one of {MODES}")
    ensure_directories(config.output_dir)
    ctx = RunContext(config=config, workers=workers)
    logger.info(f"Starting {mode} run (config {config.digest}, seed {config.seed})")

    if mode == "analytic":
        values = run_analytic(ctx)
    elif mode == "paths-mc":
        values = run_paths_mc(ctx)
    elif mode == "cascade":
        values = run_cascade(ctx)
    elif mode == "detect":
        values = run_detect(ctx)
    elif mode == "fit":
        values = run_fit(ctx, curve_path)
    elif mode == "fig4":
        values = run_fig4(ctx)
    else:
        values = run_crosscheck(ctx)

    summary_path = ctx.path(f"{mode.replace('-', '_')}_summary.txt")
    save_report({"mode": mode, **values}, summary_path, ctx.header)
    ctx.record(summary_path)
    logger.info(f"Finished {mode} run: {len(ctx.artifacts)} artifacts in {config.output_dir}")
    return {"status": "success", "mode": mode, "artifacts": [str(p) for p in ctx.artifacts], **values}
