"""Experiment configuration and pipeline orchestration."""

from superbunch.pipeline.experiment import (
    OUTPUT_FORMATS,
    ExperimentConfig,
    get_default_config,
    load_config,
    parse_config,
)
from superbunch.pipeline.runner import (
    FIG4_SCENARIOS,
    MODES,
    RunContext,
    run_pipeline,
)

__all__ = [
    # Configuration
    "OUTPUT_FORMATS",
    "ExperimentConfig",
    "get_default_config",
    "load_config",
    "parse_config",
    # Runner
    "FIG4_SCENARIOS",
    "MODES",
    "RunContext",
    "run_pipeline",
]
