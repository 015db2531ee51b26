"""
Estimators on simulated intensities: lagged correlation with block-bootstrap
errors, one-point moments of correlated traces, first-order field
correlation and a chi-square test against the compound density.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from superbunch.analytics.intensity import cdf_compound
from superbunch.config import (
    BLOCK_COHERENCE_TIMES,
    BOOTSTRAP_REPLICATES,
    MAX_LAG_FRACTION,
    MIN_DURATION_COHERENCE_TIMES,
    logger,
)
from superbunch.errors import ContractViolation
from superbunch.speckle.fields import IntensityTrace
from superbunch.speckle.samples import IntensitySampleSet
from superbunch.types import G2Curve


def _block_samples(trace: IntensityTrace, block_length: float | None, fallback: float) -> int:
    if block_length is None:
        if trace.coherence_time:
            block_length = BLOCK_COHERENCE_TIMES * trace.coherence_time
        else:
            block_length = fallback
    return max(1, int(math.ceil(block_length / trace.dt)))


def _bootstrap_weights(n_blocks: int, replicates: int, seed: int) -> np.ndarray:
    """(replicates, n_blocks) multiplicities of blocks drawn with replacement."""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, n_blocks, size=(replicates, n_blocks))
    weights = np.zeros((replicates, n_blocks))
    np.add.at(weights, (np.repeat(np.arange(replicates), n_blocks), picks.ravel()), 1.0)
    return weights


def correlate(trace: IntensityTrace, max_lag: float, n_lags: int, block_length: float = None,
              replicates: int = BOOTSTRAP_REPLICATES, seed: int = 0) -> G2Curve:
    """
    Normalized intensity correlation <I(t) I(t+tau)> / (<I(t)> <I(t+tau)>).

    Lags are rounded to whole samples over [-max_lag, max_lag]; the estimator
    is symmetric in tau. Standard errors come from a block bootstrap with
    blocks of 10 coherence times.
    """
    duration = trace.duration
    if not 0 <= max_lag <= MAX_LAG_FRACTION * duration:
        raise ContractViolation(f"max_lag={max_lag:.3e} must be <= duration/10 = {MAX_LAG_FRACTION * duration:.3e}")
    if trace.coherence_time and duration < MIN_DURATION_COHERENCE_TIMES * trace.coherence_time:
        raise ContractViolation(
            f"trace duration {duration:.3e} is shorter than {MIN_DURATION_COHERENCE_TIMES} coherence times"
        )
    if n_lags < 1:
        raise ContractViolation(f"n_lags must be >= 1, got {n_lags}")
    if trace.mean <= 0:
        raise ContractViolation("cannot normalize a trace with zero mean intensity")

    requested = np.linspace(-max_lag, max_lag, int(n_lags)) if n_lags > 1 else np.array([0.0])
    steps = np.unique(np.rint(requested / trace.dt).astype(np.int64))
    if len(steps) < n_lags:
        logger.warning(f"Lag grid collapsed from {n_lags} to {len(steps)} points at dt={trace.dt:.3e}")

    intensity = trace.samples
    k_max = int(np.abs(steps).max())
    block = _block_samples(trace, block_length, fallback=max(max_lag, trace.dt))
    n_blocks = (len(intensity) - k_max) // block
    if n_blocks < 2:
        raise ContractViolation(f"trace too short for block bootstrap: {n_blocks} blocks of {block} samples")
    m = n_blocks * block

    magnitudes = np.unique(np.abs(steps))
    products = np.empty((len(magnitudes), n_blocks))
    heads = np.empty_like(products)
    tails = np.empty_like(products)
    for i, k in enumerate(magnitudes):
        head = intensity[:m]
        tail = intensity[k:k + m]
        products[i] = (head * tail).reshape(n_blocks, block).sum(axis=1)
        heads[i] = head.reshape(n_blocks, block).sum(axis=1)
        tails[i] = tail.reshape(n_blocks, block).sum(axis=1)

    estimate = products.sum(axis=1) * m / (heads.sum(axis=1) * tails.sum(axis=1))

    weights = _bootstrap_weights(n_blocks, replicates, seed)
    replicas = (weights @ products.T) * m / ((weights @ heads.T) * (weights @ tails.T))
    spread = np.std(replicas, axis=0, ddof=1)

    index = np.searchsorted(magnitudes, np.abs(steps))
    logger.debug(f"Correlated {len(intensity)} samples over {len(steps)} lags, {n_blocks} blocks")
    return G2Curve(
        lags=steps * trace.dt,
        values=estimate[index],
        stderr=spread[index],
        label=trace.label or "correlate",
    )


def g2_zero_estimate(trace: IntensityTrace) -> float:
    """One-point <I^2>/<I>^2 of a trace."""
    return float(np.mean(trace.samples**2) / trace.mean**2)


@dataclass
class MomentEstimate:
    """Sample moments <I^q> for q = 1..q_max with standard errors."""

    orders: tuple[int, ...]
    values: np.ndarray
    stderr: np.ndarray

    def normalized(self, q: int) -> float:
        return float(self.values[q - 1] / self.values[0] ** q)


def trace_moments(trace: IntensityTrace, q_max: int = 3, block_length: float = None) -> MomentEstimate:
    """One-point moments of a serially correlated trace with block-mean standard errors."""
    block = _block_samples(trace, block_length, fallback=trace.dt)
    n_blocks = len(trace.samples) // block
    if n_blocks < 2:
        raise ContractViolation(f"trace too short for {block}-sample blocks")
    usable = trace.samples[: n_blocks * block]
    orders = tuple(range(1, q_max + 1))
    values, errors = [], []
    for q in orders:
        block_means = (usable**q).reshape(n_blocks, block).mean(axis=1)
        values.append(block_means.mean())
        errors.append(block_means.std(ddof=1) / math.sqrt(n_blocks))
    return MomentEstimate(orders=orders, values=np.array(values), stderr=np.array(errors))


def sample_moments(sample_set: IntensitySampleSet, q_max: int = 3) -> MomentEstimate:
    """MomentEstimate of an i.i.d. sample set."""
    orders = tuple(range(1, q_max + 1))
    return MomentEstimate(
        orders=orders,
        values=np.array([sample_set.moment(q) for q in orders]),
        stderr=np.array([sample_set.moment_stderr(q) for q in orders]),
    )


def first_order_correlation(field: np.ndarray, dt: float, lags) -> np.ndarray:
    """Time-averaged <E(t) E*(t+tau)> normalized by <|E|^2>, at lags rounded to samples."""
    field = np.asarray(field, dtype=np.complex128)
    power = float(np.mean(np.abs(field) ** 2))
    steps = np.rint(np.asarray(lags, dtype=np.float64) / dt).astype(np.int64)
    out = np.empty(len(steps), dtype=np.complex128)
    n = len(field)
    for i, k in enumerate(steps):
        a = abs(int(k))
        value = np.mean(field[: n - a] * np.conj(field[a:]))
        out[i] = value if k >= 0 else np.conj(value)
    return out / power


def compound_histogram_test(sample_set: IntensitySampleSet, n_bins: int = 50,
                            lower: float = 1e-3, upper: float = 30.0) -> tuple[float, float]:
    """
    Chi-square test of samples against the n-stage compound law.

    Bin edges are log-spaced in I/<I> between `lower` and `upper`, with the
    outer bins extended to 0 and infinity so every sample is counted.

    Returns:
        (statistic, p_value)
    """
    edges = np.logspace(math.log10(lower), math.log10(upper), n_bins + 1)
    edges[0], edges[-1] = 0.0, np.inf
    scaled = sample_set.samples / sample_set.mean_intensity
    observed = np.bincount(np.searchsorted(edges[1:-1], scaled, side="right"), minlength=n_bins)
    probabilities = np.diff(np.asarray(cdf_compound(edges, 1.0, sample_set.n_stages)))
    expected = probabilities / probabilities.sum() * observed.sum()
    result = stats.chisquare(observed, expected)
    return float(result.statistic), float(result.pvalue)
