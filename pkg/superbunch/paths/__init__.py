"""Two-photon path enumeration and path-interference Monte Carlo."""

from superbunch.paths.enumeration import (
    TermCensus,
    TwoPhotonPath,
    assignment_matrix,
    census_g2,
    enumerate_paths,
    term_census,
)
from superbunch.paths.montecarlo import (
    PhaseFrequencyDraw,
    draw_scatterers,
    g2_distinguishable,
    g2_mc,
    g2_mc_curve,
    path_amplitude,
)

__all__ = [
    # Enumeration
    "TermCensus",
    "TwoPhotonPath",
    "assignment_matrix",
    "census_g2",
    "enumerate_paths",
    "term_census",
    # Monte Carlo
    "PhaseFrequencyDraw",
    "draw_scatterers",
    "g2_distinguishable",
    "g2_mc",
    "g2_mc_curve",
    "path_amplitude",
]
