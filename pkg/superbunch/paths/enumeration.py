"""
Two-photon path alternatives through a cascade of two-scatterer stages.

At every stage one photon passes scatterer a and the other scatterer b.
A path is fixed by stating, for each stage, which detector receives the
photon that passed a at that stage. N stages give 2**N alternatives: the
first stage decides the detector pairing and every further stage doubles
the set by either keeping or exchanging the scatterers.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from superbunch.analytics.coherence import sinc
from superbunch.config import MAX_ENUMERATION_STAGES, MAX_MC_STAGES
from superbunch.errors import ContractViolation, RangeError
from superbunch.types import CascadeSpec

DETECTORS = (1, 2)


def _other(detector: int) -> int:
    return 2 if detector == 1 else 1


@dataclass(frozen=True)
class TwoPhotonPath:
    """
    One indistinguishable alternative.

    `assignment[j]` is the detector (1 or 2) reached by the photon that
    passes scatterer a at stage j+1.
    """

    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(k) for k in self.assignment))
        if not self.assignment:
            raise ContractViolation("a path needs at least one stage")
        if any(k not in DETECTORS for k in self.assignment):
            raise ContractViolation(f"detector labels must be 1 or 2, got {self.assignment}")

    @property
    def n_stages(self) -> int:
        return len(self.assignment)

    @property
    def detector_assignment(self) -> tuple[int, int]:
        """Detectors reached by the photons leaving a1 and b1."""
        first = self.assignment[0]
        return first, _other(first)

    def _route(self, detector: int) -> tuple[str, ...]:
        labels = [
            f"{'a' if k == detector else 'b'}{j + 1}" for j, k in enumerate(self.assignment)
        ]
        return tuple(labels) + (f"D{detector}",)

    @property
    def route_a(self) -> tuple[str, ...]:
        """Scatterers visited by the photon starting at a1, then its detector."""
        return self._route(self.detector_assignment[0])

    @property
    def route_b(self) -> tuple[str, ...]:
        return self._route(self.detector_assignment[1])

    @property
    def label(self) -> str:
        return f"{''.join(self.route_a)}·{''.join(self.route_b)}"

    @property
    def mask(self) -> int:
        """Bit j set when the a-scatterer photon of stage j+1 goes to detector 2."""
        return sum(1 << j for j, k in enumerate(self.assignment) if k == 2)


def enumerate_paths(n_stages: int) -> list[TwoPhotonPath]:
    """All 2**n_stages alternatives, built by doubling stage by stage."""
    if int(n_stages) != n_stages or not 1 <= n_stages <= MAX_ENUMERATION_STAGES:
        raise RangeError(f"n_stages must be in [1, {MAX_ENUMERATION_STAGES}], got {n_stages}")

    assignments = [(k,) for k in DETECTORS]
    for _ in range(int(n_stages) - 1):
        assignments = [prefix + (k,) for prefix in assignments for k in DETECTORS]
    return [TwoPhotonPath(a) for a in assignments]


def assignment_matrix(paths: list[TwoPhotonPath]) -> np.ndarray:
    """(paths, stages) array, 0 where the a-photon reaches D1 and 1 for D2."""
    return np.array([[k - 1 for k in p.assignment] for p in paths], dtype=np.int8)


class TermCensus(NamedTuple):
    total_terms: int
    autocorrelation_terms: int
    cross_groups: dict


def term_census(n_stages: int) -> TermCensus:
    """
    Classify the (2**N)**2 terms of |sum A|^2 by their surviving frequency exponents.

    In A_p A_q^* the frequencies of stage j cancel when both paths send the
    a-photon to the same detector; otherwise a factor exp(-i(w_a - w_b) tau)
    survives. A term is labeled by the tuple of stages (1-based) whose factor
    survives. The empty tuple marks autocorrelation terms.
    """
    if int(n_stages) != n_stages or not 1 <= n_stages <= MAX_MC_STAGES:
        raise RangeError(f"n_stages must be in [1, {MAX_MC_STAGES}], got {n_stages}")

    size = 1 << int(n_stages)
    masks = np.arange(size, dtype=np.int64)
    counts = np.zeros(size, dtype=np.int64)
    for p in range(size):
        counts += np.bincount(masks ^ p, minlength=size)

    groups = {}
    for pattern in range(1, size):
        stages = tuple(j + 1 for j in range(int(n_stages)) if pattern >> j & 1)
        groups[stages] = int(counts[pattern])

    return TermCensus(
        total_terms=int(counts.sum()),
        autocorrelation_terms=int(counts[0]),
        cross_groups=groups,
    )


def census_g2(tau, spec: CascadeSpec):
    """
    g2(tau) reassembled from the term groups.

    A group whose surviving stages are S averages to prod_{j in S} sinc^2(dw_j tau/2)
    over flat bands; the background is the autocorrelation count.
    """
    bandwidths = spec.bandwidths
    if not bandwidths:
        return 1.0 if np.ndim(tau) == 0 else np.ones_like(np.asarray(tau, dtype=np.float64))

    census = term_census(len(bandwidths))
    tau_arr = np.asarray(tau, dtype=np.float64)
    factors = [sinc(bw * tau_arr / 2.0) ** 2 for bw in bandwidths]

    total = np.full_like(tau_arr, float(census.autocorrelation_terms))
    for stages, count in census.cross_groups.items():
        total = total + count * math.prod((factors[j - 1] for j in stages), start=np.ones_like(tau_arr))
    result = total / census.autocorrelation_terms
    return float(result) if np.ndim(tau) == 0 else result
