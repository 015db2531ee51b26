"""
Configuration constants and logging setup for superbunch.
"""

import logging
import math
import os
from pathlib import Path

from dotenv import load_dotenv


def _load_local_env():
    """Load .env file for local runs (skipped when absent)."""
    env_file = Path(__file__).parent.parent / ".env"
    if env_file.exists():
        load_dotenv(env_file)


_load_local_env()

# Logging configuration
logging.basicConfig(
    level=os.environ.get("SUPERBUNCH_LOG_LEVEL", "INFO").upper(),
    format='%(asctime)s | %(levelname)s | %(message)s',
    datefmt='%Y-%m-%d %H:%M:%S'
)
logger = logging.getLogger("superbunch")

# Output location and parallelism
OUTPUT_DIR = Path(os.environ.get("SUPERBUNCH_OUTPUT_DIR", "results"))
N_WORKERS = int(os.environ.get("SUPERBUNCH_WORKERS", "1"))

# Physical conventions
SPEED_OF_LIGHT = 299_792_458.0  # m/s
DEFAULT_WAVELENGTH = 780e-9  # m, laser line of the reference measurement
DEFAULT_CENTRAL_FREQUENCY = 2 * math.pi * SPEED_OF_LIGHT / DEFAULT_WAVELENGTH  # rad/s

# Analytics
MAX_G2_ZERO_STAGES = 62  # 2**N stays exact as a float up to here
QUAD_RTOL = 1e-10  # relative tolerance requested from scipy quad
QUAD_ACCEPT_RTOL = 1e-6  # reported error above this fails the integration
QUAD_LIMIT = 400  # subinterval cap per quad call

# Path-interference Monte Carlo
MAX_ENUMERATION_STAGES = 20
MAX_MC_STAGES = 12  # each realization costs 2**N amplitudes
MIN_REALIZATIONS = 1000
MC_CHUNK_ELEMENTS = 1 << 20  # realizations * paths per chunk
MC_STREAM = 1  # SeedSequence spawn key for scatterer draws

# Field synthesis
DEFAULT_MODES = 256
MIN_DEVELOPED_MODES = 64  # fewer modes give under-developed speckle
MIN_DURATION_COHERENCE_TIMES = 100
SYNTHESIS_CHUNK_ELEMENTS = 1 << 21  # time samples * modes per chunk
STAGE_STREAM = 2
MODULATOR_STREAM = 3
DEFAULT_DWELL_FRACTION = 0.1  # modulator dwell as a fraction of the final stage tau_c

# Correlation estimator
BLOCK_COHERENCE_TIMES = 10
BOOTSTRAP_REPLICATES = 200
MAX_LAG_FRACTION = 0.1  # max_lag <= duration * this

# Photodetection
MAX_RATE_DT = 0.1  # mean_rate * dt upper bound for thinning
THINNING_BLOCK = 4096  # trace samples per majorant block
HISTOGRAM_LAG_FRACTION = 0.01  # max_lag <= duration * this
HISTOGRAM_CHUNK = 1 << 16  # channel-1 tags per pairing pass
BASELINE_COHERENCE_TIMES = 5  # baseline must start beyond this many tau_c

# Fitting
MULTI_START_COUNT = 5
GRID_START_POINTS = 40  # log-spaced scaled bandwidths searched for one fit start
FIT_RETRY_ATTEMPTS = 3
FIT_MAX_NFEV = 5000
FIT_TOLERANCE = 1e-15
FIT_JITTER = 0.3  # log-normal sigma applied to bandwidth starts
MIN_FIT_POINTS = 10
AMPLITUDE_BOUNDS = (-0.99, 50.0)
