import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

from app.config import SimulationSettings

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class TrialPoolManager:
    """Process pool for Monte-Carlo trials with lifecycle management.

    With a single worker no pool is created and trials run in-process. Results
    always come back in submission order, so serial and parallel runs
    aggregate identically.
    """

    def __init__(self, config: SimulationSettings):
        self._executor: ProcessPoolExecutor | None = None
        self._config = config
        self._is_initialized = False

    def startup(self) -> None:
        """Start the worker processes.

        Should be called during application startup.
        """
        if self._is_initialized:
            logger.warning("Trial pool already initialized")
            return

        try:
            if self._config.workers > 1:
                self._executor = ProcessPoolExecutor(max_workers=self._config.workers)
            self._is_initialized = True
            logger.info(f"Trial pool initialized with {self._config.workers} worker(s)")

        except Exception as e:
            logger.error(f"Failed to initialize trial pool: {e}")
            raise

    def shutdown(self) -> None:
        """Stop the worker processes.

        Should be called during application shutdown.
        """
        if not self._is_initialized:
            logger.warning("Trial pool not initialized")
            return

        try:
            if self._executor:
                self._executor.shutdown(wait=True, cancel_futures=True)
                self._executor = None

            self._is_initialized = False
            logger.info("Trial pool shutdown successfully")

        except Exception as e:
            logger.error(f"Error during trial pool shutdown: {e}")
            raise

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """Apply ``fn`` to every item, in parallel when the pool has workers.

        Raises:
            RuntimeError: If the pool is not initialized

        """
        if not self._is_initialized:
            raise RuntimeError("Trial pool not initialized. Call startup() first.")

        if self._executor is None:
            return [fn(item) for item in items]
        items = list(items)
        chunksize = max(1, len(items) // (4 * self._config.workers))
        return list(self._executor.map(fn, items, chunksize=chunksize))

    @property
    def is_initialized(self) -> bool:
        """Check if the trial pool is initialized."""
        return self._is_initialized


# Global instance placeholder - set up by the application startup
trial_pool_manager: TrialPoolManager | None = None


def get_trial_pool_manager() -> TrialPoolManager:
    """Get the global trial pool manager instance.

    Returns:
        TrialPoolManager: The global trial pool manager

    Raises:
        RuntimeError: If the manager is not initialized

    """
    if trial_pool_manager is None:
        raise RuntimeError(
            "Trial pool manager not initialized. Initialize it in the application startup.",
        )
    return trial_pool_manager


def initialize_trial_pool(config: SimulationSettings) -> TrialPoolManager:
    """Initialize the global trial pool manager.

    Args:
        config: Simulation settings

    Returns:
        TrialPoolManager: The initialized trial pool manager

    """
    global trial_pool_manager

    if trial_pool_manager is not None:
        logger.warning("Trial pool manager already exists, shutting down the old instance")
        trial_pool_manager.shutdown()

    trial_pool_manager = TrialPoolManager(config)
    trial_pool_manager.startup()
    return trial_pool_manager


def shutdown_trial_pool() -> None:
    """Shutdown the global trial pool manager."""
    global trial_pool_manager

    if trial_pool_manager is not None:
        trial_pool_manager.shutdown()
        trial_pool_manager = None
