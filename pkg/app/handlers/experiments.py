import argparse
import logging
from collections.abc import Callable

from app.config import SimulationSettings
from app.handlers.common import add_output_argument, add_seed_argument, parse_methods
from app.schemas.harness import ExperimentResult, SummaryRow, TrialRecord
from app.services.experiments import (
    run_misalignment_experiment,
    run_mse_experiment,
    run_spectral_efficiency,
)
from app.services.writers import write_models
from app.trial_pool import TrialPoolManager
from app.utils import open_output

logger = logging.getLogger(__name__)


def _add_common_arguments(parser: argparse.ArgumentParser) -> None:
    add_seed_argument(parser)
    add_output_argument(parser)
    parser.add_argument("--trials", dest="n_trials", type=int, help="Monte-Carlo trial count")
    parser.add_argument(
        "--methods",
        type=parse_methods,
        help="Comma-separated methods (default: all)",
    )
    parser.add_argument(
        "--tx-power",
        dest="tx_powers_dbm",
        type=float,
        nargs="+",
        metavar="DBM",
        help="Transmit powers to sweep",
    )
    parser.add_argument("--workers", type=int, help="Worker processes for the trials")
    parser.add_argument(
        "--per-trial",
        action="store_true",
        help="Write one row per trial and method instead of the aggregate",
    )


def register(subparsers: argparse._SubParsersAction) -> None:
    mse = subparsers.add_parser("mse", help="AoA estimation MSE over transmit power")
    _add_common_arguments(mse)
    mse.add_argument("--n-measurements", type=int, help="Training length")
    mse.set_defaults(handler=handle_mse)

    misalignment = subparsers.add_parser(
        "misalignment",
        help="Beam misalignment rate over transmit power",
    )
    _add_common_arguments(misalignment)
    misalignment.add_argument("--n-measurements", type=int, help="Training length")
    misalignment.set_defaults(handler=handle_misalignment)

    efficiency = subparsers.add_parser(
        "spectral-efficiency",
        help="Spectral efficiency over training length",
    )
    _add_common_arguments(efficiency)
    efficiency.add_argument(
        "--n-values",
        dest="n_measurements_sweep",
        type=int,
        nargs="+",
        metavar="N",
        help="Training lengths to sweep",
    )
    efficiency.set_defaults(handler=handle_spectral_efficiency)


def _write_result(args: argparse.Namespace, result: ExperimentResult) -> int:
    with open_output(args.output) as stream:
        if args.per_trial:
            count = write_models(stream, TrialRecord, result.records)
        else:
            count = write_models(stream, SummaryRow, result.summary)
    logger.info(f"Wrote {count} rows")
    return 0


def _log_summary(
    result: ExperimentResult,
    metric: Callable[[SummaryRow], float],
    name: str,
) -> None:
    for row in result.summary:
        logger.info(
            f"{row.method.value} tx={row.tx_power_dbm:g} dBm N={row.n_measurements}: "
            f"{name}={metric(row):.4g}",
        )


def handle_mse(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    result = run_mse_experiment(
        settings, settings.methods, settings.tx_powers_dbm, settings.n_measurements, pool,
    )
    _log_summary(result, lambda row: row.mse, "mse")
    return _write_result(args, result)


def handle_misalignment(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    result = run_misalignment_experiment(
        settings, settings.methods, settings.tx_powers_dbm, settings.n_measurements, pool,
    )
    _log_summary(result, lambda row: row.misalignment_rate, "misalignment")
    return _write_result(args, result)


def handle_spectral_efficiency(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    """Sweep training lengths at the configured transmit power.

    ``--tx-power`` replaces the single configured power with a list.
    """
    tx_powers = settings.tx_powers_dbm if args.tx_powers_dbm else [settings.tx_power_dbm]
    result = run_spectral_efficiency(
        settings, settings.methods, tx_powers, settings.n_measurements_sweep, pool,
    )
    _log_summary(result, lambda row: row.spectral_efficiency, "se")
    return _write_result(args, result)
