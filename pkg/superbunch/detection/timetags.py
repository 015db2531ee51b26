"""
Photon time tags from an intensity trace: inhomogeneous Poisson detection,
beam-splitter routing, dark counts and per-detector dead time.
"""

from dataclasses import dataclass

import numpy as np

from superbunch.config import MAX_RATE_DT, THINNING_BLOCK, logger
from superbunch.errors import ContractViolation
from superbunch.speckle.fields import IntensityTrace
from superbunch.utils import stream_generator

# Stream keys so signal photons do not change when dark counts are switched on.
_SIGNAL, _ROUTING, _DARK = 11, 12, 13


@dataclass
class TimeTagStream:
    """Ordered detection times of one channel."""

    tags: np.ndarray
    channel: int
    duration: float
    dead_time: float = 0.0
    dark_rate: float = 0.0

    def __post_init__(self):
        self.tags = np.asarray(self.tags, dtype=np.float64).ravel()
        if self.channel not in (1, 2):
            raise ContractViolation(f"channel must be 1 or 2, got {self.channel}")
        if self.dead_time < 0 or self.dark_rate < 0:
            raise ContractViolation("dead_time and dark_rate must be >= 0")
        if len(self.tags):
            gaps = np.diff(self.tags)
            if np.any(gaps <= 0):
                raise ContractViolation("tags must be strictly increasing")
            if self.dead_time > 0 and np.any(gaps < self.dead_time):
                raise ContractViolation(f"tags closer than the dead time {self.dead_time:.3e}")
            if self.tags[0] < 0 or self.tags[-1] > self.duration:
                raise ContractViolation("tags must lie within [0, duration]")

    def __len__(self) -> int:
        return len(self.tags)

    @property
    def rate(self) -> float:
        return len(self.tags) / self.duration if self.duration > 0 else 0.0


def apply_dead_time(tags: np.ndarray, dead_time: float) -> np.ndarray:
    """Non-paralyzable dead time: drop events within dead_time of the last kept one."""
    if dead_time <= 0 or len(tags) == 0:
        return tags
    kept = []
    i = 0
    n = len(tags)
    while i < n:
        kept.append(i)
        i = int(np.searchsorted(tags, tags[i] + dead_time, side="left"))
    return tags[np.asarray(kept, dtype=np.int64)]


def _thinned_events(rate: np.ndarray, dt: float, rng: np.random.Generator) -> np.ndarray:
    """
    Inhomogeneous Poisson events for a piecewise-constant rate by thinning.

    Candidates are drawn block by block at the block's peak rate and kept with
    probability rate/peak.
    """
    n = len(rate)
    starts = np.arange(0, n, THINNING_BLOCK)
    peaks = np.maximum.reduceat(rate, starts)
    lengths = np.diff(np.append(starts, n))
    counts = rng.poisson(peaks * lengths * dt)

    block = np.repeat(np.arange(len(starts)), counts)
    times = (starts[block] + rng.uniform(0.0, 1.0, size=counts.sum()) * lengths[block]) * dt
    sample = np.minimum((times / dt).astype(np.int64), n - 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        accept = rng.uniform(0.0, 1.0, size=len(times)) * peaks[block] < rate[sample]
    return np.sort(times[accept])


def sample_timetags(trace: IntensityTrace, mean_rate: float, split_ratio: float = 0.5, dead_time: float = 0.0,
                    dark_rate: float = 0.0, seed: int = 0) -> tuple[TimeTagStream, TimeTagStream]:
    """
    Detect a trace on two channels behind a beam splitter.

    Args:
        trace: Intensity trace; detection rate is mean_rate * I(t)/<I>
        mean_rate: Total detected signal rate before splitting, counts/s
        split_ratio: Probability of routing a photon to channel 1
        dead_time: Per-detector non-paralyzable dead time, seconds
        dark_rate: Dark count rate of each detector, counts/s
        seed: Fixes every random choice

    Returns:
        (channel-1 stream, channel-2 stream)
    """
    if not mean_rate > 0:
        raise ContractViolation(f"mean_rate must be > 0, got {mean_rate}")
    if mean_rate * trace.dt >= MAX_RATE_DT:
        raise ContractViolation(f"mean_rate*dt={mean_rate * trace.dt:.3g} must be < {MAX_RATE_DT}")
    if not 0 < split_ratio < 1:
        raise ContractViolation(f"split_ratio must be in (0, 1), got {split_ratio}")
    if dead_time < 0 or dark_rate < 0:
        raise ContractViolation("dead_time and dark_rate must be >= 0")
    if trace.mean <= 0:
        raise ContractViolation("trace has zero mean intensity")

    duration = trace.duration
    rate = mean_rate * trace.samples / trace.mean
    signal = _thinned_events(rate, trace.dt, stream_generator(seed, _SIGNAL))
    to_first = stream_generator(seed, _ROUTING).uniform(size=len(signal)) < split_ratio

    streams = []
    for channel, photons in ((1, signal[to_first]), (2, signal[~to_first])):
        rng = stream_generator(seed, _DARK, channel)
        dark = rng.uniform(0.0, duration, size=rng.poisson(dark_rate * duration)) if dark_rate > 0 else np.empty(0)
        merged = np.unique(np.concatenate([photons, dark]))
        tags = apply_dead_time(merged, dead_time)
        streams.append(TimeTagStream(tags, channel, duration, dead_time, dark_rate))

    logger.info(
        f"Detected {len(streams[0])} + {len(streams[1])} tags over {duration:.3e}s "
        f"(signal {len(signal)}, dark rate {dark_rate:g}/s)"
    )
    return streams[0], streams[1]
