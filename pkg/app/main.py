import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from app.app import SimulatorApplication
from app.handlers import (
    beamspace,
    codebook,
    experiments,
    pathloss,
    scenario_stats,
    selftest,
)

# Log to stderr so CSV written to stdout stays clean
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.StreamHandler(sys.stderr),
    ],
)

logger = logging.getLogger(__name__)

HANDLER_MODULES = (scenario_stats, pathloss, beamspace, experiments, codebook, selftest)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uav-beamtrain",
        description="Navigation-assisted beam training for UAV mmWave links under attitude jitter",
    )
    parser.add_argument("--config", type=Path, help="TOML settings file (default: ./uavbt.toml)")
    parser.add_argument("--debug", action="store_true", help="Log at DEBUG level")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in HANDLER_MODULES:
        module.register(subparsers)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Main entry point for the simulator CLI."""
    args = build_parser().parse_args(argv)
    logger.debug(f"Running {args.command}")
    try:
        return SimulatorApplication(args).run()
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130


if __name__ == "__main__":
    sys.exit(main())
