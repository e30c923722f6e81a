import argparse
import logging

from app.config import SimulationSettings
from app.enums import Method
from app.handlers.common import add_output_argument, add_seed_argument
from app.schemas.geometry import AoaPair
from app.schemas.sensing import METHOD_PRESETS, SensingSpec
from app.services.sensing import beamspace_map, range_energy_fraction, sensing_matrix
from app.services.writers import write_grid
from app.trial_pool import TrialPoolManager
from app.utils import open_output, trial_rng

logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser(
        "beamspace",
        help="Normalized captured-energy map of one random sensing matrix",
    )
    add_seed_argument(parser)
    add_output_argument(parser)
    parser.add_argument(
        "--method",
        type=Method,
        choices=[m for m in Method if m.is_training],
        default=Method.partial_type2,
        help="Preset sub-array count and half-width",
    )
    parser.add_argument("--n-subarrays", type=int, help="Override the preset sub-array count")
    parser.add_argument("--half-width", type=float, help="Override the preset half-width")
    parser.add_argument(
        "--center", type=float, nargs=2, default=(0.0, 0.0), metavar=("PSI", "OMEGA"),
    )
    parser.add_argument("--measurements", type=int, default=64)
    parser.add_argument("--grid", type=int, default=64, help="Grid points per axis")
    parser.set_defaults(handler=handle_beamspace)


def handle_beamspace(
    args: argparse.Namespace,
    settings: SimulationSettings,
    pool: TrialPoolManager,
) -> int:
    geom = settings.uav_geometry
    preset = METHOD_PRESETS[args.method]
    center = AoaPair(psi=args.center[0], omega=args.center[1])
    spec = preset.spec(args.measurements, center, geom)
    if args.n_subarrays is not None or args.half_width is not None:
        n_subarrays = args.n_subarrays or spec.n_subarrays_x
        spec = SensingSpec(
            n_measurements=args.measurements,
            n_subarrays_x=n_subarrays,
            n_subarrays_y=n_subarrays,
            half_width=spec.half_width if args.half_width is None else args.half_width,
            center=center,
            uav_geom=geom,
        )

    matrix = sensing_matrix(spec, trial_rng(settings.seed, 0))
    energy, psi, omega = beamspace_map(matrix, args.grid)
    fraction = range_energy_fraction(matrix, matrix.declared_range)
    logger.info(
        f"Declared range {matrix.declared_range.bounds()}, "
        f"{fraction:.1%} of the captured energy inside",
    )
    with open_output(args.output) as stream:
        write_grid(stream, energy, psi, omega)
    return 0
