"""
Superbunch

Superbunching of cascaded pseudothermal light: exact coherence curves, path
interference Monte Carlo, speckle trace synthesis, photodetection and fitting.
run_experiment.py and the tests import from here.
"""

# Config and constants
from superbunch.config import (
    DEFAULT_CENTRAL_FREQUENCY,
    DEFAULT_MODES,
    N_WORKERS,
    OUTPUT_DIR,
    logger,
)

# Errors
from superbunch.errors import (
    ConfigError,
    ContractViolation,
    DomainError,
    FitError,
    NumericalError,
    RangeError,
    SuperbunchError,
)

# Core types
from superbunch.types import (
    CascadeSpec,
    G2Curve,
    SpectralStage,
    bandwidth_from_coherence_time,
    coherence_time,
)

# Utilities
from superbunch.utils import (
    config_hash,
    ensure_directories,
    output_header,
    stream_generator,
)

# Analytic results
from superbunch.analytics import (
    MomentTable,
    analytic_curve,
    build_moment_table,
    cdf_compound,
    finite_mode_g2_zero,
    g2_cascade,
    g2_single,
    g2_zero,
    lag_grid,
    moment,
    pdf_compound,
    pdf_exponential,
)

# Path interference
from superbunch.paths import (
    TermCensus,
    TwoPhotonPath,
    census_g2,
    enumerate_paths,
    g2_distinguishable,
    g2_mc,
    g2_mc_curve,
    term_census,
)

# Speckle synthesis and estimators
from superbunch.speckle import (
    IntensitySampleSet,
    IntensityTrace,
    cascade_intensity_trace,
    compound_histogram_test,
    correlate,
    im_equivalent_trace,
    sample_compound_intensity,
    synthesize_stage_field,
    trace_moments,
)

# Photodetection
from superbunch.detection import (
    CoincidenceHistogram,
    TimeTagStream,
    coincidence_histogram,
    dark_count_dilution,
    normalize_histogram,
    sample_timetags,
)

# Fitting
from superbunch.fitting import (
    FitResult,
    ProductCheck,
    fit_g2,
    g2_model,
    product_curve_check,
)

# Pipeline
from superbunch.pipeline import (
    MODES,
    ExperimentConfig,
    get_default_config,
    load_config,
    run_pipeline,
)

__all__ = [
    # Config
    "DEFAULT_CENTRAL_FREQUENCY",
    "DEFAULT_MODES",
    "N_WORKERS",
    "OUTPUT_DIR",
    "logger",
    # Errors
    "ConfigError",
    "ContractViolation",
    "DomainError",
    "FitError",
    "NumericalError",
    "RangeError",
    "SuperbunchError",
    # Types
    "CascadeSpec",
    "G2Curve",
    "SpectralStage",
    "bandwidth_from_coherence_time",
    "coherence_time",
    # Utils
    "config_hash",
    "ensure_directories",
    "output_header",
    "stream_generator",
    # Analytics
    "MomentTable",
    "analytic_curve",
    "build_moment_table",
    "cdf_compound",
    "finite_mode_g2_zero",
    "g2_cascade",
    "g2_single",
    "g2_zero",
    "lag_grid",
    "moment",
    "pdf_compound",
    "pdf_exponential",
    # Paths
    "TermCensus",
    "TwoPhotonPath",
    "census_g2",
    "enumerate_paths",
    "g2_distinguishable",
    "g2_mc",
    "g2_mc_curve",
    "term_census",
    # Speckle
    "IntensitySampleSet",
    "IntensityTrace",
    "cascade_intensity_trace",
    "compound_histogram_test",
    "correlate",
    "im_equivalent_trace",
    "sample_compound_intensity",
    "synthesize_stage_field",
    "trace_moments",
    # Detection
    "CoincidenceHistogram",
    "TimeTagStream",
    "coincidence_histogram",
    "dark_count_dilution",
    "normalize_histogram",
    "sample_timetags",
    # Fitting
    "FitResult",
    "ProductCheck",
    "fit_g2",
    "g2_model",
    "product_curve_check",
    # Pipeline
    "MODES",
    "ExperimentConfig",
    "get_default_config",
    "load_config",
    "run_pipeline",
]
