"""Virtual two-detector measurement chain: time tags and coincidence histograms."""

from superbunch.detection.histogram import (
    CoincidenceHistogram,
    coincidence_histogram,
    dark_count_dilution,
    normalize_histogram,
)
from superbunch.detection.timetags import (
    TimeTagStream,
    apply_dead_time,
    sample_timetags,
)

__all__ = [
    # Time tags
    "TimeTagStream",
    "apply_dead_time",
    "sample_timetags",
    # Histograms
    "CoincidenceHistogram",
    "coincidence_histogram",
    "dark_count_dilution",
    "normalize_histogram",
]
