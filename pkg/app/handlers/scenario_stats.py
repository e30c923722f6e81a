import argparse
import logging

from app.config import SimulationSettings
from app.handlers.common import (
    add_output_argument,
    add_scenario_arguments,
    add_seed_argument,
    require_seed,
    scenario_from_args,
)
from app.schemas.geometry import ORIGIN
from app.schemas.jitter import AoaDistribution
from app.services.geometry import direction_between
from app.services.jitter import aoa_distribution, aoa_time_series, empirical_aoa_statistics
from app.services.writers import write_rows
from app.trial_pool import TrialPoolManager
from app.utils import open_output, trial_rng

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "scenario-stats",
        help="Gaussian law of the UAV AoA under attitude jitter",
    )
    add_scenario_arguments(parser)
    add_seed_argument(parser, required=False)
    add_output_argument(parser)
    parser.add_argument(
        "--samples",
        type=int,
        default=0,
        help="Also report Monte-Carlo statistics from this many jitter draws",
    )
    parser.add_argument(
        "--time-series",
        type=int,
        default=0,
        metavar="STEPS",
        help="Write jittered (psi_u, omega_u, psi_b, omega_b) samples instead of statistics",
    )
    parser.set_defaults(handler=handle_scenario_stats)


def distribution_rows(prefix: str, dist: AoaDistribution) -> list[list[object]]:
    intervals = dist.intervals()
    return [
        [f"{prefix}mean", *dist.mean],
        [f"{prefix}std", *dist.std],
        [f"{prefix}lower_3sigma", *intervals[:, 0]],
        [f"{prefix}upper_3sigma", *intervals[:, 1]],
        [f"{prefix}cov_row_psi", *dist.covariance[0]],
        [f"{prefix}cov_row_omega", *dist.covariance[1]],
    ]


def handle_scenario_stats(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    """Report mean, covariance, marginal deviations and 3-sigma intervals."""
    scenario = scenario_from_args(args)
    direction = direction_between(ORIGIN, scenario.position)
    jm = settings.jitter_model

    if args.time_series:
        require_seed(args, "--time-series")
        series = aoa_time_series(
            scenario.desired, direction, jm, args.time_series, trial_rng(settings.seed, 0),
        )
        with open_output(args.output) as stream:
            write_rows(
                stream,
                ["step", "psi_uav", "omega_uav", "psi_bs", "omega_bs"],
                ([step, *row] for step, row in enumerate(series)),
            )
        return 0

    dist = aoa_distribution(scenario.desired, direction, jm)
    rows = distribution_rows("", dist)
    if args.samples:
        require_seed(args, "--samples")
        empirical = empirical_aoa_statistics(
            scenario.desired, direction, jm, args.samples, trial_rng(settings.seed, 0),
        )
        rows.extend(distribution_rows("empirical_", empirical))

    logger.info(
        f"AoA at {scenario.position}: mean={dist.mean.round(4)}, std={dist.std.round(4)}",
    )
    with open_output(args.output) as stream:
        write_rows(stream, ["statistic", "psi", "omega"], rows)
    return 0
