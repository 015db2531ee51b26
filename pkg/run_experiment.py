#!/usr/bin/env python3
"""
Superbunch experiment runner.

Runs one pipeline mode and writes plot-ready artifacts:
    python run_experiment.py analytic
    python run_experiment.py fig4 --config experiment.example.json --seed 7
    python run_experiment.py fit --curve results/detect_curve.csv

Exit codes: 0 success, 2 configuration error, 3 numerical or fit error.
"""

import argparse
import sys

from superbunch.config import N_WORKERS, logger
from superbunch.errors import ConfigError, SuperbunchError
from superbunch.pipeline import MODES, OUTPUT_FORMATS, load_config, run_pipeline

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON experiment configuration merged over the defaults")
    common.add_argument("--seed", type=int, help="Override simulation.seed")
    common.add_argument("--out", help="Override outputs.directory")
    common.add_argument("--format", choices=OUTPUT_FORMATS, help="Raw trace and tag export format")
    common.add_argument("--workers", type=int, default=None,
                        help=f"Monte Carlo workers (default {N_WORKERS}); never changes outputs")
    common.add_argument("--print-config", action="store_true",
                        help="Print the resolved configuration as JSON and exit")

    parser = argparse.ArgumentParser(
        description="Superbunching of cascaded pseudothermal light",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python run_experiment.py analytic                 # exact g2 curve of the configured cascade
  python run_experiment.py paths-mc --workers 4     # path interference Monte Carlo
  python run_experiment.py fig4 --out results/fig4  # three scenarios, fits and product check
  python run_experiment.py crosscheck               # every estimator against the exact curve
        """,
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        command = sub.add_parser(mode, parents=[common], help=f"Run the {mode} pipeline")
        if mode == "fit":
            command.add_argument("--curve", help="Curve CSV (lag_s,value,stderr) to fit instead of a detect run")
    return parser


def main(argv: list[str] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        "simulation.seed": args.seed,
        "outputs.directory": args.out,
        "outputs.format": args.format,
    }
    try:
        config = load_config(args.config, overrides)
        if args.print_config:
            print(config.to_json())
            return EXIT_OK
        if args.workers is not None and args.workers < 1:
            raise ConfigError("--workers", f"must be >= 1, got {args.workers}")
        result = run_pipeline(config, args.mode, workers=args.workers or N_WORKERS,
                              curve_path=getattr(args, "curve", None))
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except SuperbunchError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_NUMERICAL

    logger.info(f"Wrote {len(result['artifacts'])} artifacts")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
