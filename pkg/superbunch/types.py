"""
Core value types: spectral stages, cascade descriptions and g2 curves.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from superbunch.config import DEFAULT_CENTRAL_FREQUENCY
from superbunch.errors import ContractViolation, DomainError


def coherence_time(bandwidth: float) -> float:
    """Coherence time tau_c = 2*pi/bandwidth (first zero of the sinc factor)."""
    if not bandwidth > 0:
        raise DomainError(f"bandwidth must be > 0, got {bandwidth}")
    return 2 * math.pi / bandwidth


def bandwidth_from_coherence_time(tau_c: float) -> float:
    """Inverse of coherence_time()."""
    if not tau_c > 0:
        raise DomainError(f"coherence time must be > 0, got {tau_c}")
    return 2 * math.pi / tau_c


@dataclass(frozen=True)
class SpectralStage:
    """One randomizing stage with a flat spectrum of full width `bandwidth` (rad/s)."""

    bandwidth: float
    rotating: bool = True

    def __post_init__(self):
        if self.rotating and not (self.bandwidth > 0 and math.isfinite(self.bandwidth)):
            raise DomainError(f"rotating stage needs a finite bandwidth > 0, got {self.bandwidth}")

    @property
    def coherence_time(self) -> float | None:
        return coherence_time(self.bandwidth) if self.rotating else None

    def to_dict(self) -> dict:
        return {"bandwidth": self.bandwidth, "rotating": self.rotating}


@dataclass(frozen=True)
class CascadeSpec:
    """
    Ordered stages of a cascade plus the carrier frequency.

    Only rotating stages randomize the light; static stages behave as if
    absent in every analytic result. The carrier is used by the path Monte
    Carlo alone, everything else works at baseband.
    """

    stages: tuple[SpectralStage, ...] = ()
    central_frequency: float = DEFAULT_CENTRAL_FREQUENCY

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        if not self.central_frequency > 0:
            raise DomainError(f"central_frequency must be > 0, got {self.central_frequency}")

    @classmethod
    def from_bandwidths(cls, bandwidths, rotating=None, **kwargs) -> "CascadeSpec":
        """Build a cascade from a list of bandwidths (all rotating by default)."""
        flags = rotating if rotating is not None else [True] * len(bandwidths)
        stages = [SpectralStage(float(bw), bool(flag)) for bw, flag in zip(bandwidths, flags)]
        return cls(stages=tuple(stages), **kwargs)

    @property
    def rotating_stages(self) -> tuple[SpectralStage, ...]:
        return tuple(s for s in self.stages if s.rotating)

    @property
    def n_effective(self) -> int:
        return len(self.rotating_stages)

    @property
    def bandwidths(self) -> tuple[float, ...]:
        """Bandwidths of the rotating stages, in stage order."""
        return tuple(s.bandwidth for s in self.rotating_stages)

    @property
    def max_coherence_time(self) -> float | None:
        times = [s.coherence_time for s in self.rotating_stages]
        return max(times) if times else None

    @property
    def min_coherence_time(self) -> float | None:
        times = [s.coherence_time for s in self.rotating_stages]
        return min(times) if times else None

    def with_rotation(self, flags) -> "CascadeSpec":
        """Same stages with the rotating flags replaced."""
        stages = [SpectralStage(s.bandwidth, bool(f)) for s, f in zip(self.stages, flags)]
        return CascadeSpec(stages=tuple(stages), central_frequency=self.central_frequency)

    def to_dict(self) -> dict:
        return {
            "stages": [s.to_dict() for s in self.stages],
            "central_frequency": self.central_frequency,
        }


@dataclass
class G2Curve:
    """Sampled normalized second-order coherence with per-point standard errors."""

    lags: np.ndarray
    values: np.ndarray
    stderr: np.ndarray = None
    label: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.lags = np.asarray(self.lags, dtype=np.float64).ravel()
        self.values = np.asarray(self.values, dtype=np.float64).ravel()
        if self.stderr is None:
            self.stderr = np.zeros_like(self.values)
        self.stderr = np.asarray(self.stderr, dtype=np.float64).ravel()

        if not (len(self.lags) == len(self.values) == len(self.stderr)):
            raise ContractViolation(
                f"lags, values and stderr lengths differ: "
                f"{len(self.lags)}, {len(self.values)}, {len(self.stderr)}"
            )
        if len(self.lags) > 1 and not np.all(np.diff(self.lags) > 0):
            raise ContractViolation("lags must be strictly increasing")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise ContractViolation("values must be finite and non-negative")
        if np.any(self.stderr < 0) or not np.all(np.isfinite(self.stderr)):
            raise ContractViolation("stderr must be finite and non-negative")

    def __len__(self) -> int:
        return len(self.lags)

    @property
    def has_errors(self) -> bool:
        return bool(np.any(self.stderr > 0))

    def value_at(self, tau: float) -> float:
        """Linear interpolation of the curve at lag tau."""
        return float(np.interp(tau, self.lags, self.values))

    def peak(self) -> float:
        """Value at the lag closest to zero."""
        return float(self.values[np.argmin(np.abs(self.lags))])

    def resample(self, lags) -> "G2Curve":
        """Linear interpolation onto a new lag grid inside the current range."""
        lags = np.asarray(lags, dtype=np.float64)
        if lags.min() < self.lags[0] or lags.max() > self.lags[-1]:
            raise ContractViolation("resampling grid extends outside the curve's lag range")
        return G2Curve(
            lags=lags,
            values=np.interp(lags, self.lags, self.values),
            stderr=np.interp(lags, self.lags, self.stderr),
            label=self.label,
            metadata=dict(self.metadata),
        )
