"""
Least-squares fits of g2 curves to products of sinc^2 factors.

Model with K factors:

    g(tau) = prod_j [1 + beta_j sinc^2(dw_j tau / 2)]

`single` is K = 1, `product-2` is K = 2 and `product-K` any K >= 1.
Bandwidths are fitted in units of the largest |lag| so that the problem is
scale free. The fit uses scipy's bounded trust-region least squares from
several starts: the peak-and-minimum guess, the best point of a coarse
bandwidth grid (one or two factors), and jittered alternatives. Each start
is retried with a re-jittered guess when the solver stops without
converging.
"""

import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy import stats
from scipy.optimize import least_squares
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from superbunch.analytics.coherence import sinc
from superbunch.config import (
    AMPLITUDE_BOUNDS,
    FIT_JITTER,
    FIT_MAX_NFEV,
    FIT_RETRY_ATTEMPTS,
    FIT_TOLERANCE,
    GRID_START_POINTS,
    MIN_FIT_POINTS,
    MULTI_START_COUNT,
    logger,
)
from superbunch.errors import ContractViolation, FitError
from superbunch.types import G2Curve

# sinc^2(x) = 1/2 at x = 1.39156
_HALF_POINT = 1.3915573703
_SCALED_BANDWIDTH_BOUNDS = (1e-3, 1e5)


def model_factors(model: str) -> int:
    """Number of sinc^2 factors of a model identifier."""
    if model == "single":
        return 1
    match = re.fullmatch(r"product-(\d+)", model)
    if match and int(match.group(1)) >= 1:
        return int(match.group(1))
    raise ContractViolation(f"unknown fit model '{model}' (use single, product-2 or product-N)")


def g2_model(tau, amplitudes, bandwidths):
    """Evaluate the product-of-sinc^2 model."""
    tau = np.asarray(tau, dtype=np.float64)
    result = np.ones_like(tau)
    for beta, bw in zip(amplitudes, bandwidths):
        result = result * (1.0 + beta * sinc(bw * tau / 2.0) ** 2)
    return result


@dataclass
class FitResult:
    """Fitted parameters, sorted by decreasing bandwidth."""

    model: str
    amplitudes: tuple
    bandwidths: tuple
    g2_zero: float
    coherence_times: tuple
    covariance: np.ndarray
    residual_rms: float
    cost: float = 0.0
    weighted: bool = False
    start_index: int = 0
    n_starts: int = 0
    diagnostics: dict = field(default_factory=dict)

    @property
    def parameter_stderr(self) -> np.ndarray:
        """Standard errors of (amplitudes..., bandwidths...)."""
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def amplitude_stderr(self) -> tuple:
        return tuple(float(s) for s in self.parameter_stderr[: len(self.amplitudes)])

    @property
    def bandwidth_stderr(self) -> tuple:
        return tuple(float(s) for s in self.parameter_stderr[len(self.amplitudes):])

    @property
    def g2_zero_stderr(self) -> float:
        """Delta-method error of prod(1 + beta_j)."""
        k = len(self.amplitudes)
        gradient = np.zeros(2 * k)
        for j in range(k):
            gradient[j] = math.prod(1.0 + b for i, b in enumerate(self.amplitudes) if i != j)
        return float(math.sqrt(max(gradient @ self.covariance @ gradient, 0.0)))

    def g2_zero_interval(self, confidence: float = 0.95) -> tuple[float, float]:
        z = stats.norm.ppf(0.5 + confidence / 2.0)
        err = z * self.g2_zero_stderr
        return self.g2_zero - err, self.g2_zero + err

    def evaluate(self, tau):
        return g2_model(tau, self.amplitudes, self.bandwidths)

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "g2_zero": self.g2_zero,
            "g2_zero_stderr": self.g2_zero_stderr,
            "amplitudes": list(self.amplitudes),
            "amplitude_stderr": list(self.amplitude_stderr),
            "bandwidths_rad_s": list(self.bandwidths),
            "bandwidth_stderr_rad_s": list(self.bandwidth_stderr),
            "coherence_times_s": list(self.coherence_times),
            "residual_rms": self.residual_rms,
            "cost": self.cost,
            "weighted": self.weighted,
            "start_index": self.start_index,
            "n_starts": self.n_starts,
        }


@dataclass
class _FitProblem:
    u: np.ndarray
    values: np.ndarray
    sigma: np.ndarray
    k: int
    lower: np.ndarray
    upper: np.ndarray

    def residuals(self, x):
        return (g2_model(self.u, x[: self.k], x[self.k:]) - self.values) / self.sigma

    def clip(self, x):
        span = self.upper - self.lower
        return np.clip(x, self.lower + 1e-9 * span, self.upper - 1e-9 * span)


def _folded_profile(u: np.ndarray, values: np.ndarray):
    """Curve on the side of zero holding more points, ordered by |u|."""
    positive = u >= 0
    side = positive if positive.sum() >= (~positive).sum() else ~positive
    order = np.argsort(np.abs(u[side]))
    return np.abs(u[side])[order], values[side][order]


def _initial_guess(u: np.ndarray, values: np.ndarray, k: int) -> tuple[np.ndarray, list]:
    """Peak height sets the amplitudes; first local minimum or half-height sets the bandwidths."""
    peak = float(values[np.argmin(np.abs(u))])
    excess = max(peak - 1.0, 1e-3)
    beta = (1.0 + excess) ** (1.0 / k) - 1.0

    a, v = _folded_profile(u, values)
    y_half = None
    below = np.flatnonzero((v - 1.0 <= excess / 2.0) & (a > 0))
    if len(below):
        y_half = 2 * _HALF_POINT / a[below[0]]
    y_min = None
    for i in range(1, len(v) - 1):
        if v[i] < v[i - 1] and v[i] <= v[i + 1] and v[i] - 1.0 < excess / 2.0 and a[i] > 0:
            y_min = 2 * math.pi / a[i]
            break
    if y_half is None and y_min is None:
        logger.warning("Curve never drops to half its peak excess; it may not span a full lobe")
    reference = y_min or y_half or 8 * math.pi
    secondary = y_half or reference

    if k == 1:
        leading = np.array([reference])
        others = [np.array([secondary]), np.array([0.5 * reference]), np.array([2.0 * reference]),
                  np.array([0.8 * secondary])]
    else:
        leading = np.concatenate([[reference], secondary * np.geomspace(0.5, 0.2, k - 1)])
        base = secondary * np.geomspace(1.0, 0.2, k)
        others = [2.0 * base, base, 5.0 * base, 10.0 * base]
    amplitudes = np.full(k, beta)
    first = np.concatenate([amplitudes, leading])
    alternatives = [np.concatenate([amplitudes, bw]) for bw in others]
    return first, alternatives


def _grid_start(problem: _FitProblem) -> np.ndarray | None:
    """
    Best bandwidth combination on a log grid, one or two factors only.

    Covers scaled bandwidths from a lobe wider than the lag range down to a
    lobe two samples wide. At each grid point the amplitudes come from a
    linear solve on the expanded product 1 + b1 s1 + b2 s2 + b1 b2 s1 s2,
    with b1 b2 treated as a free coefficient.
    """
    k = problem.k
    if k > 2:
        return None
    spacing = np.diff(np.unique(np.abs(problem.u)))
    y_hi = math.pi / float(np.median(spacing)) if len(spacing) else 8 * math.pi
    grid = np.geomspace(0.5, max(y_hi, 1.0), GRID_START_POINTS)
    if k == 1:
        pairs = grid[:, None]
    else:
        slow, fast = np.triu_indices(len(grid))
        pairs = np.column_stack([grid[fast], grid[slow]])

    target = (problem.values - 1.0) / problem.sigma
    best, best_cost = None, math.inf
    for bw in pairs:
        factors = [sinc(y * problem.u / 2.0) ** 2 for y in bw]
        basis = factors if k == 1 else factors + [factors[0] * factors[1]]
        coef, *_ = np.linalg.lstsq(np.column_stack(basis) / problem.sigma[:, None], target, rcond=None)
        x = problem.clip(np.concatenate([coef[:k], bw]))
        cost = float(np.sum(problem.residuals(x) ** 2))
        if cost < best_cost:
            best, best_cost = x, cost
    return best


def _jitter(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    y = x.copy()
    y[:k] = y[:k] * rng.uniform(0.8, 1.2, size=k)
    y[k:] = y[k:] * np.exp(rng.normal(0.0, FIT_JITTER, size=k))
    return y


def _solve(problem: _FitProblem, x0: np.ndarray):
    result = least_squares(
        problem.residuals,
        problem.clip(x0),
        bounds=(problem.lower, problem.upper),
        method="trf",
        x_scale="jac",
        ftol=FIT_TOLERANCE,
        xtol=FIT_TOLERANCE,
        gtol=FIT_TOLERANCE,
        max_nfev=FIT_MAX_NFEV,
    )
    if result.status <= 0:
        raise FitError(
            f"least squares stopped without converging: {result.message}",
            {"status": int(result.status), "cost": float(result.cost), "x": result.x.tolist()},
        )
    return result


def _covariance(result, problem: _FitProblem, weighted: bool) -> np.ndarray:
    jac = result.jac
    cov = np.linalg.pinv(jac.T @ jac)
    if not weighted:
        dof = max(len(problem.u) - len(result.x), 1)
        cov = cov * (2.0 * result.cost / dof)
    return cov


def fit_g2(curve: G2Curve, model: str = "single", initial_guess=None, seed: int = 0) -> FitResult:
    """
    Fit a g2 curve.

    Args:
        curve: At least 10 points; stderr > 0 selects weighted residuals
        model: 'single', 'product-2' or 'product-N'
        initial_guess: Optional (amplitudes..., bandwidths...) in rad/s
        seed: Seeds the jitter of restarts

    Raises:
        FitError: constant curve, or no start converged
    """
    k = model_factors(model)
    if len(curve) < MIN_FIT_POINTS:
        raise ContractViolation(f"fit needs at least {MIN_FIT_POINTS} points, got {len(curve)}")
    if float(np.ptp(curve.values)) == 0.0:
        raise FitError("no structure: curve is constant", {"value": float(curve.values[0])})

    scale = float(np.max(np.abs(curve.lags)))
    if scale <= 0:
        raise ContractViolation("lag grid must extend beyond zero")
    u = curve.lags / scale

    weighted = curve.has_errors
    if weighted:
        positive = curve.stderr[curve.stderr > 0]
        sigma = np.where(curve.stderr > 0, curve.stderr, positive.min())
    else:
        sigma = np.ones_like(curve.values)

    lower = np.concatenate([np.full(k, AMPLITUDE_BOUNDS[0]), np.full(k, _SCALED_BANDWIDTH_BOUNDS[0])])
    upper = np.concatenate([np.full(k, AMPLITUDE_BOUNDS[1]), np.full(k, _SCALED_BANDWIDTH_BOUNDS[1])])
    problem = _FitProblem(u, curve.values, sigma, k, lower, upper)

    rng = np.random.default_rng(seed)
    first, alternatives = _initial_guess(u, curve.values, k)
    if initial_guess is not None:
        guess = np.asarray(initial_guess, dtype=np.float64)
        if guess.shape != (2 * k,):
            raise ContractViolation(f"initial_guess needs {2 * k} values for model '{model}'")
        first = np.concatenate([guess[:k], guess[k:] * scale])
    starts = [first]
    grid = _grid_start(problem)
    if grid is not None:
        starts.append(grid)
    starts += [_jitter(a, k, rng) for a in alternatives][: MULTI_START_COUNT - len(starts)]

    best, best_index, failures = None, -1, []
    for index, start in enumerate(starts):
        try:
            for attempt in Retrying(
                stop=stop_after_attempt(FIT_RETRY_ATTEMPTS),
                retry=retry_if_exception_type(FitError),
                reraise=True,
            ):
                with attempt:
                    x0 = start if attempt.retry_state.attempt_number == 1 else _jitter(start, k, rng)
                    result = _solve(problem, x0)
        except FitError as e:
            logger.warning(f"Fit start {index} failed after {FIT_RETRY_ATTEMPTS} attempts: {e}")
            failures.append(e.diagnostics)
            continue
        if best is None or result.cost < best.cost:
            best, best_index = result, index

    if best is None:
        raise FitError(f"no start converged for model '{model}'", {"attempts": failures})

    order = np.argsort(-best.x[k:], kind="stable")
    permutation = np.concatenate([order, order + k])
    cov = _covariance(best, problem, weighted)[np.ix_(permutation, permutation)]
    transform = np.concatenate([np.ones(k), np.full(k, 1.0 / scale)])
    cov = cov * np.outer(transform, transform)

    amplitudes = tuple(float(b) for b in best.x[:k][order])
    bandwidths = tuple(float(y) / scale for y in best.x[k:][order])
    model_values = g2_model(curve.lags, amplitudes, bandwidths)
    fit = FitResult(
        model=model,
        amplitudes=amplitudes,
        bandwidths=bandwidths,
        g2_zero=float(g2_model(0.0, amplitudes, bandwidths)),
        coherence_times=tuple(2 * math.pi / bw for bw in bandwidths),
        covariance=cov,
        residual_rms=float(np.sqrt(np.mean((model_values - curve.values) ** 2))),
        cost=float(best.cost),
        weighted=weighted,
        start_index=best_index,
        n_starts=len(starts),
        diagnostics={"failed_starts": len(failures), "nfev": int(best.nfev)},
    )
    logger.info(
        f"Fit {model}: g2(0)={fit.g2_zero:.4f} +/- {fit.g2_zero_stderr:.4f}, "
        f"tau_c={', '.join(f'{t:.3e}' for t in fit.coherence_times)}s"
    )
    return fit
