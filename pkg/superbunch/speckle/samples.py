"""
I.i.d. draws of the compound intensity of n cascaded stages.
"""

import math
from dataclasses import dataclass

import numpy as np

from superbunch.analytics.intensity import expected_moment_stderr
from superbunch.errors import DomainError


@dataclass
class IntensitySampleSet:
    """Samples of <I> * prod_j X_j, X_j unit-mean exponentials."""

    n_stages: int
    samples: np.ndarray
    mean_intensity: float = 1.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.samples)

    def mean(self) -> float:
        return float(np.mean(self.samples))

    def moment(self, q: int) -> float:
        """Sample q-th moment."""
        return float(np.mean(self.samples**q))

    def moment_stderr(self, q: int) -> float:
        """Standard error of moment(q) from the sample variance of I**q."""
        powers = self.samples**q
        return float(np.std(powers, ddof=1) / math.sqrt(len(powers)))

    def expected_stderr(self, q: int) -> float:
        """Standard error of moment(q) from the exact heavy-tail variance."""
        return expected_moment_stderr(q, self.n_stages, len(self.samples), self.mean_intensity)

    def normalized_moment(self, q: int) -> float:
        """<I^q>/<I>^q with <I> taken as the nominal mean."""
        return self.moment(q) / self.mean_intensity**q


def sample_compound_intensity(n_stages: int, mean: float, count: int, seed) -> IntensitySampleSet:
    """Draw `count` compound intensities of `n_stages` stages scaled to `mean`."""
    if int(n_stages) != n_stages or n_stages < 1:
        raise DomainError(f"n_stages must be an integer >= 1, got {n_stages}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if not mean > 0:
        raise DomainError(f"mean must be > 0, got {mean}")

    rng = np.random.default_rng(seed)
    samples = np.full(int(count), float(mean))
    for _ in range(int(n_stages)):
        samples *= rng.standard_exponential(int(count))
    return IntensitySampleSet(n_stages=int(n_stages), samples=samples, mean_intensity=float(mean))
