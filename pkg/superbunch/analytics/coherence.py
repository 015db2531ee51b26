"""
Closed-form second-order coherence of cascaded pseudothermal light.

Every randomizing stage is modeled with a rectangular spectrum of full width
dw. One stage gives g2(tau) = 1 + sinc^2(dw*tau/2), with sinc(x) = sin(x)/x.
A cascade multiplies one such factor per rotating stage. For two stages this
is the known two-stage result. For three or more stages the product is a
conjectured closed form that agrees with 2**N at zero lag and is checked
against the path Monte Carlo.

Coherence time convention: tau_c = 2*pi/dw, the first zero of the sinc factor.
"""

import numpy as np

from superbunch.config import MAX_G2_ZERO_STAGES
from superbunch.errors import DomainError, RangeError
from superbunch.types import CascadeSpec, G2Curve


def sinc(x):
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x, dtype=np.float64) / np.pi)


def _rectangular_envelope(tau, bandwidth):
    return sinc(bandwidth * tau / 2.0) ** 2


# Squared first-order envelope per spectral shape. Only the rectangular shape
# reproduces the sinc^2 law; other shapes would register here.
FIRST_ORDER_ENVELOPES = {
    "rectangular": _rectangular_envelope,
}


def _as_output(result, tau):
    return float(result) if np.ndim(tau) == 0 else result


def g2_single(tau, delta_omega: float, shape: str = "rectangular"):
    """
    Normalized g2 of one rotating stage.

    Args:
        tau: Lag t1 - t2 in seconds (scalar or array)
        delta_omega: Full spectral width in rad/s
        shape: Key into FIRST_ORDER_ENVELOPES

    Returns:
        1 + sinc^2(delta_omega * tau / 2), float for scalar tau
    """
    if not delta_omega > 0:
        raise DomainError(f"bandwidth must be > 0, got {delta_omega}")
    if shape not in FIRST_ORDER_ENVELOPES:
        raise DomainError(f"unknown spectral shape '{shape}'")
    tau_arr = np.asarray(tau, dtype=np.float64)
    return _as_output(1.0 + FIRST_ORDER_ENVELOPES[shape](tau_arr, delta_omega), tau)


def g2_cascade(tau, spec: CascadeSpec):
    """
    Product of g2_single over the rotating stages; 1 for an all-static cascade.

    Factors multiply in order of bandwidth, so any ordering of the stages
    gives the same floats.
    """
    tau_arr = np.asarray(tau, dtype=np.float64)
    result = np.ones_like(tau_arr)
    for stage in sorted(spec.rotating_stages, key=lambda s: s.bandwidth):
        result = result * g2_single(tau_arr, stage.bandwidth)
    return _as_output(result, tau)


def g2_zero(n_rotating: int) -> float:
    """Zero-lag coherence 2**N of N rotating stages."""
    if int(n_rotating) != n_rotating or n_rotating < 0:
        raise DomainError(f"rotating stage count must be a non-negative integer, got {n_rotating}")
    if n_rotating > MAX_G2_ZERO_STAGES:
        raise RangeError(f"n_rotating={n_rotating} exceeds {MAX_G2_ZERO_STAGES}")
    return float(1 << int(n_rotating))


def lag_grid(spec: CascadeSpec, n_lags: int = 21, span: float = 3.0, fallback: float = 1e-6) -> np.ndarray:
    """Symmetric lag grid over [-span*tau_c, span*tau_c] of the slowest stage."""
    tau_c = spec.max_coherence_time or fallback
    return np.linspace(-span * tau_c, span * tau_c, n_lags)


def analytic_curve(spec: CascadeSpec, lags) -> G2Curve:
    """Exact g2 curve of a cascade on a lag grid, with zero standard errors."""
    lags = np.asarray(lags, dtype=np.float64)
    return G2Curve(
        lags=lags,
        values=np.asarray(g2_cascade(lags, spec)),
        stderr=np.zeros_like(lags),
        label="analytic",
    )


def finite_mode_g2_zero(modes: int, n_rotating: int) -> float:
    """
    Time-averaged g2(0) of a cascade synthesized from `modes` discrete modes per stage.

    One stage gives <|E|^4> = 2 - 1/M for unit mean. Independent stages multiply.
    """
    if modes < 1:
        raise DomainError(f"modes must be >= 1, got {modes}")
    return (2.0 - 1.0 / modes) ** int(n_rotating)
