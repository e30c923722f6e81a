import argparse
import logging

from app.config import SimulationSettings
from app.exceptions import NumericalGuardError
from app.handlers.common import add_output_argument
from app.schemas.harness import CheckResult
from app.services.selftest import run_selftest
from app.services.writers import write_models
from app.trial_pool import TrialPoolManager
from app.utils import open_output

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("selftest", help="Compare fast paths against their oracles")
    parser.add_argument("--seed", type=int, help="Root seed (default: configured seed)")
    parser.add_argument("--instances", type=int, default=20, help="Random instances per check")
    add_output_argument(parser)
    parser.set_defaults(handler=handle_selftest)


def handle_selftest(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    """Run every oracle check and write one row per check.

    Raises:
        NumericalGuardError: If any check exceeds its tolerance

    """
    results = run_selftest(settings.seed, args.instances)
    with open_output(args.output) as stream:
        write_models(stream, CheckResult, results)

    failed = [r.name for r in results if not r.passed]
    if failed:
        raise NumericalGuardError(f"Self-test failed: {', '.join(failed)}")
    logger.info(f"All {len(results)} self-test checks passed")
    return 0
