import argparse
import logging
from pathlib import Path

from app.config import SimulationSettings
from app.handlers.common import (
    add_output_argument,
    add_scenario_arguments,
    add_seed_argument,
    scenario_from_args,
)
from app.schemas.geometry import ORIGIN, AoaPair
from app.schemas.sensing import CodebookEntry
from app.services.codebook import generate_codebook, read_codebook, select_codebook, write_codebook
from app.services.geometry import direction_between
from app.services.jitter import aoa_distribution
from app.services.writers import write_rows
from app.trial_pool import TrialPoolManager
from app.utils import open_output

logger = logging.getLogger(__name__)

ENTRY_HEADER = ["index", "seed", "stream", "n_measurements", "n_subarrays", "half_width",
                "center_psi", "center_omega", "range_half_psi", "range_half_omega"]


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("codebook", help="Store and choose sensing matrices")
    actions = parser.add_subparsers(dest="action", required=True)

    generate = actions.add_parser("generate", help="Draw sensing matrices into a codebook file")
    add_seed_argument(generate)
    generate.add_argument("path", type=Path)
    generate.add_argument(
        "--entry",
        nargs=2,
        action="append",
        required=True,
        metavar=("N_SUBARRAYS", "HALF_WIDTH"),
        help="One configuration per flag, e.g. --entry 2 0.1",
    )
    generate.add_argument("--measurements", type=int, default=6)
    generate.add_argument(
        "--center", type=float, nargs=2, default=(0.0, 0.0), metavar=("PSI", "OMEGA"),
    )
    generate.set_defaults(handler=handle_generate)

    inspect = actions.add_parser("inspect", help="List the entries of a codebook file")
    inspect.add_argument("path", type=Path)
    add_output_argument(inspect)
    inspect.set_defaults(handler=handle_inspect, seed=None)

    select = actions.add_parser(
        "select",
        help="Pick the narrowest entry covering the predicted AoA spread",
    )
    select.add_argument("path", type=Path)
    select.add_argument("--k", type=float, default=3.0, help="Coverage in standard deviations")
    add_scenario_arguments(select)
    add_output_argument(select)
    select.set_defaults(handler=handle_select, seed=None)


def _entry_rows(entries: list[CodebookEntry], indices: list[int]) -> list[list[object]]:
    rows = []
    for index in indices:
        entry = entries[index]
        spec = entry.matrix.spec
        half_psi, half_omega = entry.matrix.declared_range.half_widths
        rows.append([
            index, entry.seed, entry.stream, spec.n_measurements, spec.n_subarrays_x,
            spec.half_width, spec.center.psi, spec.center.omega, half_psi, half_omega,
        ])
    return rows


def handle_generate(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    configurations = [(int(n_a), float(w)) for n_a, w in args.entry]
    entries = generate_codebook(
        settings.uav_geometry,
        args.measurements,
        configurations,
        AoaPair(psi=args.center[0], omega=args.center[1]),
        settings.seed,
    )
    write_codebook(args.path, entries)
    return 0


def handle_inspect(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    entries = read_codebook(args.path, settings.wavelength_m)
    with open_output(args.output) as stream:
        write_rows(stream, ENTRY_HEADER, _entry_rows(entries, list(range(len(entries)))))
    return 0


def handle_select(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    entries = read_codebook(args.path, settings.wavelength_m)
    scenario = scenario_from_args(args)
    direction = direction_between(ORIGIN, scenario.position)
    dist = aoa_distribution(scenario.desired, direction, settings.jitter_model)
    chosen = select_codebook(entries, dist, args.k)
    index = next(i for i, entry in enumerate(entries) if entry is chosen)
    logger.info(f"Selected entry {index} for AoA std {dist.std.round(4)}")
    with open_output(args.output) as stream:
        write_rows(stream, ENTRY_HEADER, _entry_rows(entries, [index]))
    return 0
