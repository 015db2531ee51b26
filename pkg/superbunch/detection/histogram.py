"""
Coincidence histograms between two detector channels and their
normalization to the accidental background.
"""

from dataclasses import dataclass

import numpy as np

from superbunch.config import BASELINE_COHERENCE_TIMES, HISTOGRAM_CHUNK, HISTOGRAM_LAG_FRACTION, logger
from superbunch.detection.timetags import TimeTagStream
from superbunch.errors import ContractViolation
from superbunch.types import G2Curve


@dataclass
class CoincidenceHistogram:
    """Pair counts binned by lag t1 - t2 on a grid centered at zero."""

    bin_width: float
    lags: np.ndarray
    counts: np.ndarray
    duration: float
    counts_ch1: int
    counts_ch2: int

    @property
    def max_lag(self) -> float:
        return float(self.lags[-1]) if len(self.lags) else 0.0

    @property
    def span(self) -> float:
        """Half-width of the counted window; the outer bins are full bins."""
        return (len(self.lags) // 2 + 0.5) * self.bin_width

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def accidental_level(self) -> float:
        """Expected counts per bin for uncorrelated channels."""
        return self.counts_ch1 * self.counts_ch2 * self.bin_width / self.duration


def coincidence_histogram(s1: TimeTagStream, s2: TimeTagStream, bin_width: float, max_lag: float) -> CoincidenceHistogram:
    """
    Full cross-correlation histogram over the bins k*bin_width, |k| <= rint(max_lag/bin_width).

    Bin k collects lags closest to k*bin_width (round half to even), so
    exchanging the channels mirrors the histogram exactly. Every pair that
    rounds into a bin is counted, so the window reaches `span`, half a bin
    past the outermost center, and the edge bins sit at the same accidental
    level as the rest.
    """
    if not bin_width > 0:
        raise ContractViolation(f"bin_width must be > 0, got {bin_width}")
    duration = max(s1.duration, s2.duration)
    if not 0 < max_lag <= HISTOGRAM_LAG_FRACTION * duration:
        raise ContractViolation(f"max_lag={max_lag:.3e} must be in (0, duration/100 = {HISTOGRAM_LAG_FRACTION * duration:.3e}]")

    half_bins = int(np.rint(max_lag / bin_width))
    counts = np.zeros(2 * half_bins + 1, dtype=np.int64)
    t1, t2 = s1.tags, s2.tags
    window = (half_bins + 1) * bin_width

    for start in range(0, len(t1), HISTOGRAM_CHUNK):
        chunk = t1[start:start + HISTOGRAM_CHUNK]
        lo = np.searchsorted(t2, chunk - window, side="left")
        hi = np.searchsorted(t2, chunk + window, side="right")
        sizes = hi - lo
        total = int(sizes.sum())
        if total == 0:
            continue
        owner = np.repeat(np.arange(len(chunk)), sizes)
        offsets = np.arange(total) - np.repeat(np.cumsum(sizes) - sizes, sizes)
        diffs = chunk[owner] - t2[lo[owner] + offsets]
        bins = np.rint(diffs / bin_width).astype(np.int64)
        bins = bins[np.abs(bins) <= half_bins]
        counts += np.bincount(bins + half_bins, minlength=len(counts))

    logger.debug(f"Histogrammed {counts.sum()} pairs into {len(counts)} bins")
    return CoincidenceHistogram(
        bin_width=bin_width,
        lags=np.arange(-half_bins, half_bins + 1) * bin_width,
        counts=counts,
        duration=duration,
        counts_ch1=len(t1),
        counts_ch2=len(t2),
    )


def normalize_histogram(h: CoincidenceHistogram, baseline_window: tuple[float, float],
                        coherence_time: float = None) -> G2Curve:
    """
    Divide counts by the mean count of bins with |lag| inside `baseline_window`.

    Per-bin stderr combines the bin's Poisson error with the Poisson error of
    the baseline mean.
    """
    lo, hi = baseline_window
    if coherence_time is not None and lo < BASELINE_COHERENCE_TIMES * coherence_time:
        raise ContractViolation(
            f"baseline window starts at {lo:.3e}, inside {BASELINE_COHERENCE_TIMES} coherence times"
        )
    magnitude = np.abs(h.lags)
    mask = (magnitude >= lo) & (magnitude <= hi)
    if not mask.any():
        raise ContractViolation(f"baseline window [{lo:.3e}, {hi:.3e}] holds no histogram bins")
    baseline_counts = h.counts[mask].sum()
    if baseline_counts == 0:
        raise ContractViolation("baseline window holds no coincidences")

    baseline = baseline_counts / mask.sum()
    counts = h.counts.astype(np.float64)
    values = counts / baseline
    # empty bins keep a one-count error so weighted fits stay defined
    variance = np.maximum(counts, 1.0) / baseline**2 + values**2 / baseline_counts
    return G2Curve(lags=h.lags.copy(), values=values, stderr=np.sqrt(variance), label="detect")


def dark_count_dilution(signal_rate: float, dark_rate: float) -> float:
    """Factor (s/(s+d))^2 by which uncorrelated counts shrink the excess g2 - 1."""
    if signal_rate <= 0 or dark_rate < 0:
        raise ContractViolation("signal_rate must be > 0 and dark_rate >= 0")
    return (signal_rate / (signal_rate + dark_rate)) ** 2
