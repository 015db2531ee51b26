#!/usr/bin/env python3
"""
Finite-mode convergence study

Synthesizes cascade traces with increasing mode counts and prints the
measured g2(0) next to the expectation (2 - 1/M)^N.
Run with: python scripts/convergence_study.py --stages 2
"""

import argparse
import math
import os
import sys
from pathlib import Path

# Run from a checkout without installing the package
sys.path.insert(0, str(Path(__file__).parent.parent))

from superbunch.analytics.coherence import finite_mode_g2_zero, g2_zero  # noqa: E402
from superbunch.errors import SuperbunchError  # noqa: E402
from superbunch.speckle.fields import cascade_intensity_trace  # noqa: E402
from superbunch.speckle.statistics import trace_moments  # noqa: E402
from superbunch.types import CascadeSpec  # noqa: E402

# ============================================================================
# CONSTANTS
# ============================================================================

DEFAULT_MODES = (1, 4, 16, 64, 256, 1024)
STAGE_COHERENCE_TIME = 1e-6  # s
SAMPLES_PER_COHERENCE_TIME = 10

# Terminal colors (disabled if not a TTY or NO_COLOR is set)
COLORS_ENABLED = sys.stdout.isatty() and os.environ.get("NO_COLOR") is None
GREEN = "\033[92m" if COLORS_ENABLED else ""
RED = "\033[91m" if COLORS_ENABLED else ""
YELLOW = "\033[93m" if COLORS_ENABLED else ""
BLUE = "\033[94m" if COLORS_ENABLED else ""
BOLD = "\033[1m" if COLORS_ENABLED else ""
DIM = "\033[2m" if COLORS_ENABLED else ""
RESET = "\033[0m" if COLORS_ENABLED else ""


# ============================================================================
# UI HELPERS
# ============================================================================


def print_header(n_stages: int):
    print(f"\n{BOLD}{'=' * 60}{RESET}")
    print(f"{BOLD}   Finite-mode convergence, N = {n_stages} rotating stages{RESET}")
    print(f"{BOLD}{'=' * 60}{RESET}\n")


def print_stage(num: int, title: str):
    print(f"\n{BLUE}{BOLD}[Step {num}] {title}{RESET}")
    print("-" * 50)


def print_success(msg: str):
    print(f"{GREEN}[OK]{RESET} {msg}")


def print_error(msg: str):
    print(f"{RED}[X]{RESET} {msg}")


def print_info(msg: str):
    print(f"{YELLOW}[i]{RESET} {msg}")


def print_dim(msg: str):
    print(f"{DIM}{msg}{RESET}")


# ============================================================================
# STUDY
# ============================================================================


def measure(n_stages: int, modes: int, duration: float, seed: int) -> tuple[float, float]:
    """Measured <I^2>/<I>^2 and its block standard error for one mode count."""
    bandwidth = 2 * math.pi / STAGE_COHERENCE_TIME
    spec = CascadeSpec.from_bandwidths([bandwidth] * n_stages)
    trace = cascade_intensity_trace(spec, duration, STAGE_COHERENCE_TIME / SAMPLES_PER_COHERENCE_TIME, modes, seed)
    estimate = trace_moments(trace, q_max=2)
    return estimate.normalized(2), float(estimate.stderr[1] / trace.mean**2)


def main():
    parser = argparse.ArgumentParser(
        description="Finite-mode convergence of synthesized cascade traces",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python scripts/convergence_study.py                   # two stages, default mode ladder
  python scripts/convergence_study.py --stages 3        # three stages
  python scripts/convergence_study.py --modes 16 256    # custom ladder
        """,
    )
    parser.add_argument("--stages", type=int, default=2, help="Rotating stages N")
    parser.add_argument("--modes", type=int, nargs="+", default=list(DEFAULT_MODES), help="Mode counts M")
    parser.add_argument("--duration", type=float, default=0.02, help="Trace length in seconds")
    parser.add_argument("--seed", type=int, default=20180701, help="Synthesis seed")
    args = parser.parse_args()

    print_header(args.stages)
    print_info(f"Ideal g2(0) = {g2_zero(args.stages):g}, coherence time {STAGE_COHERENCE_TIME:g}s")
    print_dim(f"   duration {args.duration:g}s, seed {args.seed}\n")

    print_stage(1, "Synthesize and measure")
    rows = []
    for modes in args.modes:
        try:
            value, stderr = measure(args.stages, modes, args.duration, args.seed)
        except SuperbunchError as e:
            print_error(f"M={modes}: {e}")
            continue
        expected = finite_mode_g2_zero(modes, args.stages)
        rows.append((modes, value, stderr, expected))
        within = abs(value - expected) <= 3 * stderr
        report = print_success if within else print_error
        report(f"M={modes:5d}  measured {value:.4f} +/- {stderr:.4f}  expected {expected:.4f}")

    print_stage(2, "Summary")
    print(f"{'M':>6}  {'measured':>10}  {'stderr':>8}  {'(2-1/M)^N':>10}")
    for modes, value, stderr, expected in rows:
        print(f"{modes:6d}  {value:10.4f}  {stderr:8.4f}  {expected:10.4f}")
    print()


if __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print(f"\n{YELLOW}Study cancelled.{RESET}")
        sys.exit(1)
