"""
Time-resolved pseudothermal fields and cascaded intensity traces.

A stage field is a sum of M unit modes with detunings spread uniformly over
the stage band and random phases,

    E(t) = M**-0.5 * sum_m exp(i (dw_m t + phi_m)),

which realizes the flat spectrum behind the sinc^2 law at baseband. A
cascade multiplies the stage intensities |E_j|^2. With M modes the
time-averaged <|E|^4> is 2 - 1/M, so g2(0) of an N-stage trace sits near
(2 - 1/M)**N; see finite_mode_g2_zero() and scripts/convergence_study.py.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from superbunch.config import (
    DEFAULT_DWELL_FRACTION,
    DEFAULT_MODES,
    MIN_DEVELOPED_MODES,
    MIN_DURATION_COHERENCE_TIMES,
    MODULATOR_STREAM,
    STAGE_STREAM,
    SYNTHESIS_CHUNK_ELEMENTS,
    logger,
)
from superbunch.errors import ContractViolation
from superbunch.speckle.samples import sample_compound_intensity
from superbunch.types import CascadeSpec, coherence_time
from superbunch.utils import stream_seed


@dataclass
class IntensityTrace:
    """Uniformly sampled intensity with cached mean."""

    dt: float
    samples: np.ndarray
    coherence_time: float | None = None
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.dt > 0:
            raise ContractViolation(f"dt must be > 0, got {self.dt}")
        self.samples = np.asarray(self.samples, dtype=np.float64).ravel()
        if np.any(self.samples < 0) or not np.all(np.isfinite(self.samples)):
            raise ContractViolation("intensity samples must be finite and >= 0")
        self.mean = float(np.mean(self.samples)) if len(self.samples) else 0.0

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration(self) -> float:
        return self.dt * len(self.samples)

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.samples)) * self.dt


def _sample_count(duration: float, dt: float) -> int:
    if not dt > 0:
        raise ContractViolation(f"dt must be > 0, got {dt}")
    if not duration > 0:
        raise ContractViolation(f"duration must be > 0, got {duration}")
    return max(1, int(round(duration / dt)))


def _check_resolution(bandwidth: float, duration: float, dt: float):
    if not bandwidth > 0:
        raise ContractViolation(f"bandwidth must be > 0, got {bandwidth}")
    limit = math.pi / bandwidth
    if not dt < limit:
        raise ContractViolation(f"dt={dt:.3e} must be < pi/bandwidth={limit:.3e}")
    minimum = MIN_DURATION_COHERENCE_TIMES * coherence_time(bandwidth)
    if duration < minimum:
        raise ContractViolation(
            f"duration={duration:.3e} must be >= {MIN_DURATION_COHERENCE_TIMES} coherence times ({minimum:.3e})"
        )


def synthesize_stage_field(bandwidth: float, duration: float, dt: float, modes: int = DEFAULT_MODES, seed=0) -> np.ndarray:
    """
    Complex baseband field of one rotating stage.

    Args:
        bandwidth: Full spectral width in rad/s
        duration: Trace length in seconds
        dt: Sample interval; must resolve the fastest beat (dt < pi/bandwidth)
        modes: Number of discrete modes M
        seed: int or SeedSequence

    Returns:
        Complex array of round(duration/dt) samples
    """
    _check_resolution(bandwidth, duration, dt)
    if modes < 1:
        raise ContractViolation(f"modes must be >= 1, got {modes}")
    if modes < MIN_DEVELOPED_MODES:
        logger.warning(f"Synthesizing with {modes} modes; speckle is not fully developed below {MIN_DEVELOPED_MODES}")

    rng = np.random.default_rng(seed)
    detunings = rng.uniform(-bandwidth / 2.0, bandwidth / 2.0, size=int(modes))
    phases = rng.uniform(0.0, 2 * math.pi, size=int(modes))

    n = _sample_count(duration, dt)
    field_out = np.empty(n, dtype=np.complex128)
    rows = max(1, SYNTHESIS_CHUNK_ELEMENTS // int(modes))
    norm = 1.0 / math.sqrt(modes)
    for start in range(0, n, rows):
        t = np.arange(start, min(start + rows, n)) * dt
        field_out[start:start + len(t)] = np.exp(1j * (np.outer(t, detunings) + phases)).sum(axis=1) * norm
    return field_out


def stage_intensity(bandwidth: float, duration: float, dt: float, modes: int = DEFAULT_MODES, seed=0) -> np.ndarray:
    """|E(t)|^2 of one synthesized stage."""
    e = synthesize_stage_field(bandwidth, duration, dt, modes, seed)
    return e.real**2 + e.imag**2


def cascade_intensity_trace(spec: CascadeSpec, duration: float, dt: float, modes: int = DEFAULT_MODES,
                            seed=0, mean_intensity: float = 1.0) -> IntensityTrace:
    """
    Intensity after the cascade, <I> * prod over rotating stages of |E_j(t)|^2.

    Stage j draws from its own stream (seed, j), so a stage's field does not
    depend on which other stages rotate.
    """
    n = _sample_count(duration, dt)
    intensity = np.ones(n)
    for j, stage in enumerate(spec.stages):
        if not stage.rotating:
            continue
        intensity *= stage_intensity(stage.bandwidth, duration, dt, modes, stream_seed(seed, STAGE_STREAM, j))

    logger.info(f"Cascade trace: {n} samples, N_eff={spec.n_effective}, modes={modes}")
    return IntensityTrace(
        dt=dt,
        samples=intensity * mean_intensity,
        coherence_time=spec.max_coherence_time,
        label="cascade",
        metadata={"n_effective": spec.n_effective, "modes": modes},
    )


def im_equivalent_trace(n_premodulation_stages: int, duration: float, dt: float, modes: int = DEFAULT_MODES,
                        seed=0, bandwidth: float = None, dwell: float = None,
                        mean_intensity: float = 1.0) -> IntensityTrace:
    """
    Intensity-modulator scheme: compound intensity of n stages held over each
    dwell interval, times the speckle of one rotating stage.

    The modulator levels are i.i.d. between dwells, so the speckle curve is
    multiplied by 1 + (2^n - 1)*Lambda(tau/dwell), a triangle spike one dwell
    wide. Shrinking the dwell toward zero narrows that spike; it does not
    converge to the sinc^2 shape of a real rotating stage. Only the one-point
    statistics match the (n+1)-stage cascade.

    Args:
        n_premodulation_stages: Stages whose intensity statistics the modulator imposes
        bandwidth: Bandwidth of the final rotating stage (defaults to 2*pi/1us)
        dwell: Modulator hold time (defaults to a tenth of the final tau_c)
    """
    if int(n_premodulation_stages) != n_premodulation_stages or n_premodulation_stages < 1:
        raise ContractViolation(f"n_premodulation_stages must be >= 1, got {n_premodulation_stages}")
    bandwidth = bandwidth if bandwidth is not None else 2 * math.pi / 1e-6
    tau_c = coherence_time(bandwidth)
    dwell = dwell if dwell is not None else DEFAULT_DWELL_FRACTION * tau_c
    if not dwell > 0:
        raise ContractViolation(f"dwell must be > 0, got {dwell}")

    n = _sample_count(duration, dt)
    per_dwell = max(1, int(round(dwell / dt)))
    levels = sample_compound_intensity(
        int(n_premodulation_stages), 1.0, -(-n // per_dwell), stream_seed(seed, MODULATOR_STREAM)
    ).samples
    modulation = np.repeat(levels, per_dwell)[:n]
    speckle = stage_intensity(bandwidth, duration, dt, modes, stream_seed(seed, STAGE_STREAM, 0))

    logger.info(f"IM trace: {n} samples, {n_premodulation_stages} modulated stages, dwell={per_dwell * dt:.3e}s")
    return IntensityTrace(
        dt=dt,
        samples=modulation * speckle * mean_intensity,
        coherence_time=max(tau_c, per_dwell * dt),
        label="im-equivalent",
        metadata={"n_premodulation_stages": int(n_premodulation_stages), "dwell": per_dwell * dt},
    )
