import argparse
from pathlib import Path

from app.enums import Method
from app.exceptions import ConfigError
from app.schemas.geometry import Attitude, Position3
from app.schemas.harness import Scenario
from app.services.scenario import REFERENCE_SCENARIOS


def add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", type=Path, help="CSV file to write (default: stdout)")


def add_seed_argument(parser: argparse.ArgumentParser, *, required: bool = True) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        required=required,
        help="Root seed; every random draw derives from it",
    )


def add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    """Options selecting a UAV placement: a reference scenario or explicit values."""
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--scenario",
        type=int,
        choices=sorted(REFERENCE_SCENARIOS),
        help="Reference placement (default: 1)",
    )
    group.add_argument(
        "--position",
        type=float,
        nargs=3,
        metavar=("X", "Y", "Z"),
        help="UAV position in meters, BS at the origin",
    )
    parser.add_argument("--yaw-deg", type=float, default=0.0)
    parser.add_argument("--pitch-deg", type=float, default=0.0)
    parser.add_argument("--roll-deg", type=float, default=0.0)


def scenario_from_args(args: argparse.Namespace) -> Scenario:
    """The placement chosen by :func:`add_scenario_arguments` options.

    Attitude flags apply only together with ``--position``.
    """
    if args.position is None:
        return REFERENCE_SCENARIOS[args.scenario or 1]
    return Scenario(
        position=Position3.from_array(args.position),
        desired=Attitude.from_degrees(args.yaw_deg, args.pitch_deg, args.roll_deg),
    )


def parse_methods(value: str) -> list[Method]:
    """Comma-separated method names, e.g. ``nav-only,partial-type2``."""
    try:
        return [Method(name.strip()) for name in value.split(",") if name.strip()]
    except ValueError as e:
        choices = ", ".join(m.value for m in Method)
        raise argparse.ArgumentTypeError(f"{e}; choose from {choices}") from e


def require_seed(args: argparse.Namespace, reason: str) -> None:
    """Reject a run that draws random numbers without an explicit seed.

    Raises:
        ConfigError: If ``--seed`` was not given

    """
    if args.seed is None:
        raise ConfigError(f"--seed is required for {reason}")
