"""
Monte Carlo estimate of g2 from summed two-photon path amplitudes.

Each realization draws a phase and a frequency for scatterers a and b of
every stage. A photon that passes scatterer x on its way to detector k picks
up exp(i phi_x) exp(-i w_x t_k). With symmetric detector positions the two
detection times are t1 = tau/2 and t2 = -tau/2, so only tau = t1 - t2 is
observable and the carrier terms w0 (t1 + t2) vanish. Both photons visit both
scatterers of every stage, so the phase factors are common to all paths.

Static stages carry one shared scatterer and contribute only a common
factor. The alternatives are therefore enumerated over the rotating stages.

The estimator is mean |sum_j A_j|^2 over mean sum_j |A_j|^2. The
denominator equals 2**N in every realization.
"""

import math
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from superbunch.config import (
    MAX_MC_STAGES,
    MC_CHUNK_ELEMENTS,
    MC_STREAM,
    MIN_REALIZATIONS,
    N_WORKERS,
    logger,
)
from superbunch.errors import ContractViolation, RangeError
from superbunch.paths.enumeration import TwoPhotonPath, assignment_matrix, enumerate_paths
from superbunch.types import CascadeSpec, G2Curve
from superbunch.utils import compensated_sum, stream_generator


@dataclass
class PhaseFrequencyDraw:
    """
    Scatterer phases and frequencies for one realization.

    Arrays have shape (stages, 2); column 0 is scatterer a, column 1 scatterer b.
    Static stages hold the same phase and the carrier frequency in both columns.
    """

    phases: np.ndarray
    frequencies: np.ndarray
    rotating: np.ndarray
    central_frequency: float

    def __post_init__(self):
        self.phases = np.asarray(self.phases, dtype=np.float64)
        self.frequencies = np.asarray(self.frequencies, dtype=np.float64)
        self.rotating = np.asarray(self.rotating, dtype=bool)
        if self.phases.shape != self.frequencies.shape or self.phases.shape[1:] != (2,):
            raise ContractViolation(
                f"phases {self.phases.shape} and frequencies {self.frequencies.shape} must both be (stages, 2)"
            )
        if self.rotating.shape != (self.phases.shape[0],):
            raise ContractViolation("rotating mask must have one entry per stage")

    @property
    def n_rotating(self) -> int:
        return int(self.rotating.sum())


def draw_scatterers(spec: CascadeSpec, rng: np.random.Generator, freeze_frequencies: bool = False) -> PhaseFrequencyDraw:
    """Independent phases and flat-band frequencies for every scatterer of a cascade."""
    n = len(spec.stages)
    phases = np.zeros((n, 2))
    frequencies = np.full((n, 2), spec.central_frequency)
    rotating = np.array([s.rotating for s in spec.stages], dtype=bool)

    for j, stage in enumerate(spec.stages):
        if not stage.rotating:
            phases[j, :] = rng.uniform(0.0, 2 * math.pi)
            continue
        phases[j] = rng.uniform(0.0, 2 * math.pi, size=2)
        if not freeze_frequencies:
            frequencies[j] = spec.central_frequency + rng.uniform(-0.5, 0.5, size=2) * stage.bandwidth

    return PhaseFrequencyDraw(phases, frequencies, rotating, spec.central_frequency)


def path_amplitude(path: TwoPhotonPath, draw: PhaseFrequencyDraw, tau: float) -> complex:
    """Unit-modulus probability amplitude of one alternative at lag tau."""
    if path.n_stages != draw.n_rotating:
        raise ContractViolation(
            f"path has {path.n_stages} stages but the draw has {draw.n_rotating} rotating stages"
        )
    times = {1: tau / 2.0, 2: -tau / 2.0}

    phase = float(draw.phases[:, 0].sum() + draw.phases[:, 1].sum())
    detunings = draw.frequencies - draw.central_frequency
    exponent = 0.0
    for j, k in zip(np.flatnonzero(draw.rotating), path.assignment):
        exponent -= detunings[j, 0] * times[k] + detunings[j, 1] * times[3 - k]
    return complex(np.exp(1j * (phase + exponent)))


def _chunk_sizes(realizations: int, n_paths: int) -> list[int]:
    size = max(64, MC_CHUNK_ELEMENTS // n_paths)
    full, rest = divmod(realizations, size)
    return [size] * full + ([rest] if rest else [])


def _mc_chunk(bandwidths, signs, tau, count, seed, index, freeze_frequencies, coherent):
    """Per-realization ratios for one chunk, drawn from its own counter stream."""
    rng = stream_generator(seed, MC_STREAM, index)
    n_stages = len(bandwidths)

    phases = rng.uniform(0.0, 2 * math.pi, size=(count, n_stages, 2))
    offsets = rng.uniform(-0.5, 0.5, size=(count, n_stages, 2))
    if freeze_frequencies:
        offsets[:] = 0.0
    detunings = offsets * np.asarray(bandwidths)[None, :, None]

    # signs[p, j] = +1 when the a-photon of stage j reaches D1 (t = +tau/2)
    t_a = signs * (tau / 2.0)
    exponent = -(detunings[:, :, 0] @ t_a.T + detunings[:, :, 1] @ (-t_a).T)
    common = phases.sum(axis=(1, 2))
    amplitudes = np.exp(1j * (common[:, None] + exponent))

    background = np.sum(np.abs(amplitudes) ** 2, axis=1)
    if coherent:
        signal = np.abs(amplitudes.sum(axis=1)) ** 2
    else:
        signal = background
    ratios = signal / background
    return compensated_sum(signal), compensated_sum(background), compensated_sum(ratios), compensated_sum(ratios**2)


def _check_mc_args(spec: CascadeSpec, realizations: int):
    if realizations < MIN_REALIZATIONS:
        raise ContractViolation(f"realizations={realizations} must be >= {MIN_REALIZATIONS}")
    if spec.n_effective > MAX_MC_STAGES:
        raise RangeError(f"N_eff={spec.n_effective} exceeds the Monte Carlo cap of {MAX_MC_STAGES}")


def _run_mc(spec, tau, realizations, seed, workers, freeze_frequencies, coherent):
    _check_mc_args(spec, realizations)
    if spec.n_effective == 0:
        return 1.0, 0.0

    paths = enumerate_paths(spec.n_effective)
    signs = 1.0 - 2.0 * assignment_matrix(paths).astype(np.float64)
    chunks = _chunk_sizes(int(realizations), len(paths))
    n_jobs = workers if workers is not None else N_WORKERS
    logger.debug(f"Path MC: N={spec.n_effective}, tau={tau:.3e}, {len(chunks)} chunks on {n_jobs} workers")

    results = Parallel(n_jobs=n_jobs)(
        delayed(_mc_chunk)(spec.bandwidths, signs, float(tau), count, seed, index, freeze_frequencies, coherent)
        for index, count in enumerate(chunks)
    )
    signal = math.fsum(r[0] for r in results)
    background = math.fsum(r[1] for r in results)
    ratio_sum = math.fsum(r[2] for r in results)
    ratio_sq = math.fsum(r[3] for r in results)

    estimate = signal / background
    mean_ratio = ratio_sum / realizations
    variance = max(ratio_sq - realizations * mean_ratio**2, 0.0) / (realizations - 1)
    return estimate, math.sqrt(variance / realizations)


def g2_mc(spec: CascadeSpec, tau: float, realizations: int, seed: int, workers: int = None,
          freeze_frequencies: bool = False) -> tuple[float, float]:
    """
    Path-interference Monte Carlo estimate of g2(tau).

    Returns:
        (estimate, stderr); bit-identical for a given seed and realization
        count whatever the worker count
    """
    return _run_mc(spec, tau, realizations, seed, workers, freeze_frequencies, coherent=True)


def g2_distinguishable(spec: CascadeSpec, tau: float, realizations: int, seed: int, workers: int = None) -> float:
    """Same estimator with probabilities summed instead of amplitudes; always 1."""
    estimate, _ = _run_mc(spec, tau, realizations, seed, workers, False, coherent=False)
    return estimate


def g2_mc_curve(spec: CascadeSpec, lags, realizations: int, seed: int, workers: int = None) -> G2Curve:
    """g2_mc over a lag grid, reusing the same random streams at every lag."""
    lags = np.asarray(lags, dtype=np.float64)
    estimates = [g2_mc(spec, tau, realizations, seed, workers=workers) for tau in lags]
    logger.info(f"Path MC curve: {len(lags)} lags, {realizations} realizations, N={spec.n_effective}")
    return G2Curve(
        lags=lags,
        values=np.array([e[0] for e in estimates]),
        stderr=np.array([e[1] for e in estimates]),
        label="paths-mc",
    )
