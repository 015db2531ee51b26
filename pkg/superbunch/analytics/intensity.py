"""
One-point intensity statistics of cascaded speckle.

A single stage gives negative-exponential intensity. Each further stage
multiplies by an independent unit-mean exponential, so the n-stage density
mixes the (n-1)-stage density through an exponential kernel:

    P_n(I) = integral_0^inf P_{n-1}(x) (1/x) exp(-I/x) dx

n = 2 has the closed form (2/<I>) K0(2 sqrt(I/<I>)). For n >= 3 the integral is
evaluated with scipy's adaptive quadrature in the log variable w = ln(x/<I>),
where both tails of the integrand decay faster than exponentially. Moments
follow <I^q> = <I>^q (q!)^n.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special
from scipy.integrate import quad

from superbunch.config import QUAD_ACCEPT_RTOL, QUAD_LIMIT, QUAD_RTOL
from superbunch.errors import DomainError, NumericalError, RangeError

# Exponential-kernel cutoff: exp(-800) underflows to zero.
_KERNEL_CUTOFF = 800.0
# Tail constant: the m-stage density at y is below exp(-TAIL) once m*y**(1/m) > TAIL.
_TAIL = 80.0


def _check_mean(mean: float):
    if not mean > 0:
        raise DomainError(f"mean intensity must be > 0, got {mean}")


def _check_stages(n_stages: int, minimum: int = 1):
    if int(n_stages) != n_stages or n_stages < minimum:
        raise DomainError(f"stage count must be an integer >= {minimum}, got {n_stages}")


def pdf_exponential(intensity, mean: float):
    """Negative-exponential density (1/<I>) exp(-I/<I>)."""
    _check_mean(mean)
    values = np.asarray(intensity, dtype=np.float64)
    if np.any(values < 0):
        raise DomainError("intensity must be >= 0")
    result = np.exp(-values / mean) / mean
    return float(result) if np.ndim(intensity) == 0 else result


def bessel_k0(x):
    """Modified Bessel function of the second kind, order zero."""
    values = np.asarray(x, dtype=np.float64)
    if np.any(values <= 0):
        raise DomainError("K0 is defined for x > 0 only")
    result = special.k0(values)
    return float(result) if np.ndim(x) == 0 else result


def _quad_checked(integrand, lower: float, upper: float, points=None, context: dict = None) -> float:
    """scipy quad with the non-convergence check turned into NumericalError."""
    kwargs = {"epsabs": 0.0, "epsrel": QUAD_RTOL, "limit": QUAD_LIMIT, "full_output": 1}
    if points:
        inside = sorted(p for p in points if lower < p < upper)
        if inside:
            kwargs["points"] = inside
    result = quad(integrand, lower, upper, **kwargs)
    value, abserr = result[0], result[1]
    if len(result) > 3 and abserr > QUAD_ACCEPT_RTOL * abs(value) + 1e-300:
        diagnostics = {"value": value, "abserr": abserr, "message": result[3], "interval": (lower, upper)}
        diagnostics.update(context or {})
        raise NumericalError(f"quadrature did not converge: {result[3]}", diagnostics)
    return value


def _tail_log_bound(m: int) -> float:
    """ln(y) beyond which the unit-mean m-stage density is negligible."""
    return m * math.log(_TAIL / m) + 2.0


def _unit_density(r: float, m: int) -> float:
    """Density of the m-stage compound intensity with unit mean, at r > 0."""
    if m == 1:
        return math.exp(-r)
    if m == 2:
        return 2.0 * float(special.k0(2.0 * math.sqrt(r)))

    w_lo = math.log(r) - math.log(_KERNEL_CUTOFF)
    w_hi = _tail_log_bound(m - 1)
    if w_lo >= w_hi:
        return 0.0

    def integrand(w):
        return _unit_density(math.exp(w), m - 1) * math.exp(-r * math.exp(-w))

    return _quad_checked(
        integrand, w_lo, w_hi, points=[math.log(r), 0.0], context={"intensity": r, "n_stages": m}
    )


def pdf_compound(intensity, mean: float, n_stages: int):
    """
    Density of the n-stage compound intensity.

    Args:
        intensity: I > 0 (scalar or array); the density diverges at 0 for n >= 2
        mean: <I>
        n_stages: Number of rotating stages, >= 1

    Raises:
        DomainError: for I <= 0, mean <= 0 or n < 1
        NumericalError: when the nested quadrature misses its tolerance
    """
    _check_mean(mean)
    _check_stages(n_stages)
    values = np.asarray(intensity, dtype=np.float64)
    if np.any(values <= 0):
        raise DomainError("intensity must be > 0")

    if n_stages == 1:
        result = np.exp(-values / mean) / mean
    elif n_stages == 2:
        result = 2.0 / mean * special.k0(2.0 * np.sqrt(values / mean))
    else:
        flat = [_unit_density(v / mean, int(n_stages)) / mean for v in values.ravel()]
        result = np.asarray(flat, dtype=np.float64).reshape(values.shape)
    return float(result) if np.ndim(intensity) == 0 else result


def cdf_compound(intensity, mean: float, n_stages: int):
    """Cumulative distribution of the n-stage compound intensity."""
    _check_mean(mean)
    _check_stages(n_stages)
    values = np.asarray(intensity, dtype=np.float64)
    if np.any(values < 0):
        raise DomainError("intensity must be >= 0")
    r = values / mean

    if n_stages == 1:
        result = -np.expm1(-r)
    elif n_stages == 2:
        # integral of 2 K0(2 sqrt(s)) from 0 to r is 1 - u K1(u) with u = 2 sqrt(r)
        u = 2.0 * np.sqrt(r)
        with np.errstate(invalid="ignore"):
            tail = np.where(u > 0, u * special.k1(np.where(u > 0, u, 1.0)), 1.0)
        result = np.where(np.isinf(r), 1.0, 1.0 - tail)
    else:
        flat = [_unit_cdf(v, int(n_stages)) for v in r.ravel()]
        result = np.asarray(flat, dtype=np.float64).reshape(r.shape)
    return float(result) if np.ndim(intensity) == 0 else result


def _unit_cdf(r: float, m: int) -> float:
    if r == 0:
        return 0.0
    if math.isinf(r):
        return 1.0
    # F_m(r) = integral of F_{m-1} mixing: P(x * X <= r) = E[1 - exp(-r/x)]
    w_lo = math.log(r) - math.log(_KERNEL_CUTOFF)
    w_hi = _tail_log_bound(m - 1)
    if w_lo >= w_hi:
        return 1.0

    def integrand(w):
        x = math.exp(w)
        return _unit_density(x, m - 1) * x * -math.expm1(-r / x)

    # Below w_lo the survivor term vanishes and all remaining mass counts fully
    below = _unit_cdf_of_density(math.exp(w_lo), m - 1)
    return below + _quad_checked(integrand, w_lo, w_hi, points=[math.log(r), 0.0])


def _unit_cdf_of_density(r: float, m: int) -> float:
    if m == 1:
        return -math.expm1(-r)
    if m == 2:
        u = 2.0 * math.sqrt(r)
        return 1.0 - u * float(special.k1(u))
    return _unit_cdf(r, m)


def compound_moment_quadrature(q: int, n_stages: int, mean: float = 1.0) -> float:
    """
    q-th moment of the n-stage density by quadrature (q = 0 gives the normalization).

    Integrates P_n(I) I^q dI in the log variable v = ln(I/<I>).
    """
    _check_mean(mean)
    _check_stages(n_stages)

    def integrand(v):
        r = math.exp(v)
        return _unit_density(r, int(n_stages)) * r ** (q + 1)

    v_lo = -60.0 / (q + 1)
    v_hi = _tail_log_bound(int(n_stages))
    lower = _quad_checked(integrand, v_lo, 0.0, context={"q": q, "n_stages": n_stages})
    upper = _quad_checked(integrand, 0.0, v_hi, context={"q": q, "n_stages": n_stages})
    return (lower + upper) * mean**q


def moment(q: int, n_stages: int, mean: float) -> float:
    """<I^q> = <I>^q (q!)^n, in exact integer arithmetic until the final conversion."""
    if int(q) != q or q < 1:
        raise DomainError(f"moment order must be an integer >= 1, got {q}")
    _check_stages(n_stages, minimum=0)
    _check_mean(mean)
    try:
        factor = float(math.factorial(int(q)) ** int(n_stages))
        result = mean**q * factor
    except OverflowError as e:
        raise RangeError(f"moment q={q}, n={n_stages} overflows: {e}") from e
    if not math.isfinite(result):
        raise RangeError(f"moment q={q}, n={n_stages} overflows")
    return result


def expected_moment_stderr(q: int, n_stages: int, count: int, mean: float = 1.0) -> float:
    """
    Standard error of the sample q-th moment from `count` i.i.d. draws.

    Var(I^q) = <I>^(2q) ((2q)!^n - (q!)^(2n)); for q = 2 the relative error is
    sqrt(6^n - 1)/sqrt(count).
    """
    variance = math.factorial(2 * q) ** n_stages - math.factorial(q) ** (2 * n_stages)
    return mean**q * math.sqrt(variance) / math.sqrt(count)


@dataclass
class MomentTable:
    """Moments <I^q> indexed by (q, n)."""

    mean_intensity: float
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        _check_mean(self.mean_intensity)

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.entries[key]

    def normalized(self, q: int, n_stages: int) -> float:
        """<I^q>/<I>^q for a stored entry."""
        return self.entries[(q, n_stages)] / self.mean_intensity**q


def build_moment_table(mean: float, q_max: int = 3, n_max: int = 5) -> MomentTable:
    """Table of moment(q, n, mean) for 1 <= q <= q_max and 0 <= n <= n_max."""
    table = MomentTable(mean_intensity=mean)
    for n_stages in range(n_max + 1):
        for q in range(1, q_max + 1):
            table.entries[(q, n_stages)] = moment(q, n_stages, mean)
    return table
