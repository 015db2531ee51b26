"""
Utility functions for superbunch.
"""

import hashlib
import json
import math
from pathlib import Path

import numpy as np

from superbunch.config import OUTPUT_DIR, logger


def stream_generator(seed, *key: int) -> np.random.Generator:
    """
    Counter-based random stream for (seed, key...).

    The same seed and key always give the same stream, independent of how
    many other streams were created or in which order.
    """
    return np.random.Generator(np.random.Philox(stream_seed(seed, *key)))


def stream_seed(seed, *key: int) -> np.random.SeedSequence:
    """SeedSequence for (seed, key...), usable wherever a seed is accepted."""
    if isinstance(seed, np.random.SeedSequence):
        return np.random.SeedSequence(seed.entropy, spawn_key=tuple(seed.spawn_key) + tuple(key))
    return np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))


def compensated_sum(values) -> float:
    """Order-insensitive, exactly rounded sum of floats."""
    return math.fsum(np.asarray(values, dtype=np.float64).ravel().tolist())


def canonical_json(document: dict) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


def config_hash(document: dict) -> str:
    """First 16 hex digits of SHA-256 over the canonical JSON of a config."""
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()[:16]


def output_header(config_digest: str, seed: int) -> str:
    """Header comment line carried by every artifact file."""
    return f"# superbunch config_hash={config_digest} seed={seed}"


def format_float(value: float) -> str:
    """17 significant digits, enough for an exact float round trip."""
    return format(float(value), ".17g")


def ensure_directories(path: Path = None) -> Path:
    """Create the output directory if it doesn't exist."""
    target = Path(path) if path is not None else OUTPUT_DIR
    if not target.exists():
        logger.info(f"Creating output directory {target}")
    target.mkdir(parents=True, exist_ok=True)
    return target
