import argparse
import logging
from typing import Any

from pydantic import ValidationError

from app.config import SimulationSettings, load_settings
from app.exceptions import (
    CodebookFormatError,
    ConfigError,
    GeometryError,
    NumericalGuardError,
    PartitionError,
)
from app.trial_pool import TrialPoolManager, initialize_trial_pool, shutdown_trial_pool

logger = logging.getLogger(__name__)

# Parsed options that map one-to-one onto settings fields
SETTINGS_OVERRIDES = (
    "seed",
    "n_trials",
    "tx_powers_dbm",
    "n_measurements",
    "n_measurements_sweep",
    "methods",
    "workers",
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 2
EXIT_NUMERICAL_GUARD = 3


def settings_overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Settings values given explicitly on the command line."""
    overrides = {
        key: getattr(args, key)
        for key in SETTINGS_OVERRIDES
        if getattr(args, key, None) is not None
    }
    if getattr(args, "debug", False):
        overrides["debug"] = True
    return overrides


class SimulatorApplication:
    """Simulator run with proper lifecycle management."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.settings: SimulationSettings | None = None
        self.pool: TrialPoolManager | None = None

    def startup(self) -> None:
        """Load settings and start the trial pool."""
        self.settings = load_settings(self.args.config, **settings_overrides(self.args))
        if self.settings.debug:
            logging.getLogger().setLevel(logging.DEBUG)
        logger.debug(f"Environment: {self.settings.environment.value}")
        self.pool = initialize_trial_pool(self.settings)

    def shutdown(self) -> None:
        """Release the trial pool."""
        try:
            shutdown_trial_pool()
        except Exception as e:
            logger.error(f"Error during shutdown: {e}")

    def run(self) -> int:
        """Run the selected subcommand and map failures onto exit codes.

        Returns:
            int: 0 on success, 2 for invalid input, 3 when a numerical guard trips

        """
        try:
            self.startup()
            return self.args.handler(self.args, self.settings, self.pool)
        except (
            ConfigError,
            ValidationError,
            PartitionError,
            GeometryError,
            CodebookFormatError,
        ) as e:
            logger.error(f"{e}")
            return EXIT_INVALID_INPUT
        except NumericalGuardError as e:
            logger.error(f"{e}")
            return EXIT_NUMERICAL_GUARD
        finally:
            self.shutdown()
