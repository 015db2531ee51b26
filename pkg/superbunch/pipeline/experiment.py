"""
Experiment configuration: defaults, JSON loading with validation, and the
resolved config hash.

Precedence, lowest first: get_default_config(), the JSON file, environment
(SUPERBUNCH_OUTPUT_DIR), then command-line overrides.
"""

import copy
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from superbunch.config import DEFAULT_CENTRAL_FREQUENCY, DEFAULT_MODES, logger
from superbunch.errors import ConfigError, SuperbunchError
from superbunch.fitting.models import model_factors
from superbunch.types import CascadeSpec, SpectralStage
from superbunch.utils import config_hash

OUTPUT_FORMATS = ("csv", "binary")


def get_default_config() -> dict:
    """Full default configuration document."""
    return {
        "cascade": {
            "stages": [
                {"bandwidth": 2 * math.pi / 2.15e-6, "rotating": True},
                {"bandwidth": 2 * math.pi / 1.08e-6, "rotating": True},
            ],
            "central_frequency": DEFAULT_CENTRAL_FREQUENCY,
        },
        "simulation": {
            "duration": 0.3,  # seconds, about 1.4e5 coherence times of the slow stage
            "dt": 1e-7,
            "modes": DEFAULT_MODES,
            "seed": 20180701,
            "realizations": 100000,
            "n_lags": 21,
            "lag_span": 3.0,  # grid half-width in coherence times of the slowest stage
        },
        "detection": {
            "mean_rate": 5e5,  # counts/s before the splitter
            "split_ratio": 0.5,
            "dead_time": 0.0,
            "dark_rate": 0.0,  # counts/s per detector
            "bin_width": 5e-8,
            "max_lag": 2.15e-5,
        },
        "fit": {
            "model": "product-2",
            "baseline_window": [1.72e-5, 2.15e-5],
            "dark_fraction": 0.2,  # dark-to-signal ratio of the fig4 dark-count run
        },
        "outputs": {
            "directory": "results",
            "format": "csv",
            "export_raw": False,
        },
    }


def _positive(field: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise ConfigError(field, f"must be a positive number, got {value!r}")
    return float(value)


def _non_negative(field: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
        raise ConfigError(field, f"must be a non-negative number, got {value!r}")
    return float(value)


def _integer(field: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigError(field, f"must be an integer >= {minimum}, got {value!r}")
    return value


def _parse_stage(index: int, raw) -> SpectralStage:
    field = f"cascade.stages[{index}]"
    if not isinstance(raw, dict):
        raise ConfigError(field, "must be an object")
    unknown = set(raw) - {"bandwidth", "coherence_time", "rotating"}
    if unknown:
        raise ConfigError(f"{field}.{sorted(unknown)[0]}", "unknown field")
    if ("bandwidth" in raw) == ("coherence_time" in raw):
        raise ConfigError(field, "give exactly one of bandwidth or coherence_time")
    if "bandwidth" in raw:
        bandwidth = _positive(f"{field}.bandwidth", raw["bandwidth"])
    else:
        bandwidth = 2 * math.pi / _positive(f"{field}.coherence_time", raw["coherence_time"])
    rotating = raw.get("rotating", True)
    if not isinstance(rotating, bool):
        raise ConfigError(f"{field}.rotating", f"must be true or false, got {rotating!r}")
    return SpectralStage(bandwidth=bandwidth, rotating=rotating)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated, resolved configuration."""

    cascade: CascadeSpec
    simulation: dict
    detection: dict
    fit: dict
    outputs: dict

    @property
    def seed(self) -> int:
        return self.simulation["seed"]

    @property
    def output_dir(self) -> Path:
        return Path(self.outputs["directory"])

    def to_dict(self) -> dict:
        return {
            "cascade": self.cascade.to_dict(),
            "simulation": dict(self.simulation),
            "detection": dict(self.detection),
            "fit": {**self.fit, "baseline_window": list(self.fit["baseline_window"])},
            "outputs": dict(self.outputs),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @property
    def digest(self) -> str:
        return config_hash(self.to_dict())

    def replace(self, **sections) -> "ExperimentConfig":
        """Copy with whole sections or the cascade replaced."""
        values = {
            "cascade": self.cascade,
            "simulation": dict(self.simulation),
            "detection": dict(self.detection),
            "fit": dict(self.fit),
            "outputs": dict(self.outputs),
        }
        values.update(sections)
        return ExperimentConfig(**values)


def _merge_section(name: str, defaults: dict, given) -> dict:
    if not isinstance(given, dict):
        raise ConfigError(name, "must be an object")
    for key in given:
        if key not in defaults:
            raise ConfigError(f"{name}.{key}", "unknown field")
    merged = copy.deepcopy(defaults)
    merged.update(given)
    return merged


def parse_config(document: dict) -> ExperimentConfig:
    """Merge a (partial) document over the defaults and validate every field."""
    if not isinstance(document, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    defaults = get_default_config()
    for section in document:
        if section not in defaults:
            raise ConfigError(section, "unknown section")
    merged = {name: _merge_section(name, defaults[name], document.get(name, {})) for name in defaults}

    cascade_doc = merged["cascade"]
    if not isinstance(cascade_doc["stages"], list):
        raise ConfigError("cascade.stages", "must be a list")
    stages = [_parse_stage(i, s) for i, s in enumerate(cascade_doc["stages"])]
    try:
        cascade = CascadeSpec(
            stages=tuple(stages),
            central_frequency=_positive("cascade.central_frequency", cascade_doc["central_frequency"]),
        )
    except SuperbunchError as e:
        raise ConfigError("cascade", str(e)) from e

    sim = merged["simulation"]
    simulation = {
        "duration": _positive("simulation.duration", sim["duration"]),
        "dt": _positive("simulation.dt", sim["dt"]),
        "modes": _integer("simulation.modes", sim["modes"], 1),
        "seed": _integer("simulation.seed", sim["seed"], 0),
        "realizations": _integer("simulation.realizations", sim["realizations"], 1),
        "n_lags": _integer("simulation.n_lags", sim["n_lags"], 1),
        "lag_span": _positive("simulation.lag_span", sim["lag_span"]),
    }

    det = merged["detection"]
    detection = {
        "mean_rate": _positive("detection.mean_rate", det["mean_rate"]),
        "split_ratio": _positive("detection.split_ratio", det["split_ratio"]),
        "dead_time": _non_negative("detection.dead_time", det["dead_time"]),
        "dark_rate": _non_negative("detection.dark_rate", det["dark_rate"]),
        "bin_width": _positive("detection.bin_width", det["bin_width"]),
        "max_lag": _positive("detection.max_lag", det["max_lag"]),
    }
    if detection["split_ratio"] >= 1:
        raise ConfigError("detection.split_ratio", f"must be < 1, got {detection['split_ratio']}")

    fit_doc = merged["fit"]
    try:
        model_factors(fit_doc["model"])
    except SuperbunchError as e:
        raise ConfigError("fit.model", str(e)) from e
    window = fit_doc["baseline_window"]
    if not isinstance(window, (list, tuple)) or len(window) != 2:
        raise ConfigError("fit.baseline_window", "must be a [low, high] pair")
    low = _non_negative("fit.baseline_window[0]", window[0])
    high = _positive("fit.baseline_window[1]", window[1])
    if low >= high:
        raise ConfigError("fit.baseline_window", f"low {low} must be below high {high}")
    fit = {
        "model": fit_doc["model"],
        "baseline_window": (low, high),
        "dark_fraction": _non_negative("fit.dark_fraction", fit_doc["dark_fraction"]),
    }

    out = merged["outputs"]
    if not isinstance(out["directory"], str) or not out["directory"]:
        raise ConfigError("outputs.directory", "must be a non-empty path string")
    if out["format"] not in OUTPUT_FORMATS:
        raise ConfigError("outputs.format", f"must be one of {OUTPUT_FORMATS}, got {out['format']!r}")
    if not isinstance(out["export_raw"], bool):
        raise ConfigError("outputs.export_raw", "must be true or false")
    outputs = {"directory": out["directory"], "format": out["format"], "export_raw": out["export_raw"]}

    return ExperimentConfig(cascade, simulation, detection, fit, outputs)


def load_config(path: Path = None, overrides: dict = None) -> ExperimentConfig:
    """
    Resolve a configuration.

    Args:
        path: Optional JSON file merged over the defaults
        overrides: Dotted keys from the command line, e.g. {"simulation.seed": 7}
    """
    document = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError("--config", f"file not found: {path}")
        try:
            with open(path) as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError("--config", f"invalid JSON in {path}: {e}") from e
        logger.info(f"Loaded configuration from {path}")

    if not isinstance(document, dict):
        raise ConfigError("<root>", "configuration must be a JSON object")
    env_dir = os.environ.get("SUPERBUNCH_OUTPUT_DIR")
    if env_dir:
        document.setdefault("outputs", {})
        if isinstance(document["outputs"], dict):
            document["outputs"]["directory"] = env_dir

    for dotted, value in (overrides or {}).items():
        if value is None:
            continue
        section, key = dotted.split(".", 1)
        document.setdefault(section, {})
        if isinstance(document[section], dict):
            document[section][key] = value

    return parse_config(document)
