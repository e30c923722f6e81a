import logging
import math

import numpy as np
import numpy.typing as npt

from app.schemas.geometry import UpaGeometry
from app.schemas.sensing import SensingMatrix, SensingRange, SensingSpec, SubarrayDraws
from app.services.geometry import ComplexVector, RealMatrix
from app.utils import wrap_cosine
from app.validators import validate_partition

logger = logging.getLogger(__name__)

ComplexArray = npt.NDArray[np.complex128]


def subarray_ula(phases: npt.ArrayLike, centers: npt.ArrayLike, n_axis: int) -> ComplexArray:
    """Unit-norm ULA vector built from sub-array phases and center angles.

    Block ``a`` is ``exp(j pi phases[a]) * v(centers[a], n_axis / N_a)`` with the
    uncentered steering convention. Leading axes of ``phases``/``centers`` are
    treated as a batch, the last axis indexes sub-arrays.

    Raises:
        PartitionError: If the sub-array count does not divide ``n_axis``

    """
    phases = np.asarray(phases, dtype=float)
    centers = np.asarray(centers, dtype=float)
    length = validate_partition(n_axis, phases.shape[-1])
    k = np.arange(length)
    blocks = np.exp(1j * np.pi * (phases[..., np.newaxis] + centers[..., np.newaxis] * k))
    return blocks.reshape(*phases.shape[:-1], n_axis) / math.sqrt(n_axis)


def _draw_axis(
    rng: np.random.Generator,
    n_subarrays: int,
    zeta_low: float,
    zeta_upp: float,
    n_rows: int | None = None,
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    shape = n_subarrays if n_rows is None else (n_rows, n_subarrays)
    phases = rng.uniform(-1.0, 1.0, shape)
    centers = wrap_cosine(rng.uniform(zeta_low, zeta_upp, shape))
    return phases, np.asarray(centers, dtype=float)


def random_subarray_ula(
    rng: np.random.Generator,
    n_axis: int,
    n_subarrays: int,
    zeta_low: float,
    zeta_upp: float,
) -> ComplexVector:
    """One random partially-steered ULA vector.

    Phases are i.i.d. U(-1, 1) and centers i.i.d. U(zeta_low, zeta_upp), wrapped.

    Raises:
        PartitionError: If the sub-array count does not divide ``n_axis``
        ValueError: If ``zeta_low > zeta_upp``

    """
    validate_partition(n_axis, n_subarrays)
    if zeta_low > zeta_upp:
        raise ValueError(f"Center range is empty: ({zeta_low}, {zeta_upp})")
    phases, centers = _draw_axis(rng, n_subarrays, zeta_low, zeta_upp)
    return subarray_ula(phases, centers, n_axis)


def kron_columns(x_vectors: ComplexArray, y_vectors: ComplexArray) -> ComplexArray:
    """Column-wise Kronecker products of two (N, n) stacks, returned as (n_x*n_y, N)."""
    product = x_vectors[:, :, np.newaxis] * y_vectors[:, np.newaxis, :]
    return product.reshape(x_vectors.shape[0], -1).T


def sensing_matrix(spec: SensingSpec, rng: np.random.Generator) -> SensingMatrix:
    """Draw a direction-constrained random sensing matrix.

    All x-axis draws (phases, then centers) are taken before the y-axis draws.
    """
    geom = spec.uav_geom
    n = spec.n_measurements
    w = spec.half_width
    phases_x, centers_x = _draw_axis(
        rng, spec.n_subarrays_x, spec.center.psi - w, spec.center.psi + w, n,
    )
    phases_y, centers_y = _draw_axis(
        rng, spec.n_subarrays_y, spec.center.omega - w, spec.center.omega + w, n,
    )
    columns = kron_columns(
        subarray_ula(phases_x, centers_x, geom.n_x),
        subarray_ula(phases_y, centers_y, geom.n_second_axis),
    )
    declared = spec.declared_range()
    logger.debug(
        f"Sensing matrix N={n}, N_a=({spec.n_subarrays_x}, {spec.n_subarrays_y}), "
        f"range={declared.bounds()}",
    )
    return SensingMatrix(
        columns=columns,
        declared_range=declared,
        spec=spec,
        draws=SubarrayDraws(
            phases_x=phases_x,
            centers_x=centers_x,
            phases_y=phases_y,
            centers_y=centers_y,
        ),
    )


def steering_matrix(angles: npt.ArrayLike, n: int) -> ComplexArray:
    """Centered steering vectors for many angles, shape (n, len(angles))."""
    angles = np.asarray(angles, dtype=float)
    k = np.arange(n)[:, np.newaxis] - (n - 1) / 2
    return np.exp(1j * np.pi * k * angles[np.newaxis, :])


def project_grid(
    columns: ComplexArray,
    geom: UpaGeometry,
    psi: npt.ArrayLike,
    omega: npt.ArrayLike,
) -> ComplexArray:
    """``M^H b(psi, omega)`` on the outer grid of ``psi`` x ``omega``.

    Returns:
        ComplexArray: Array of shape (len(psi), len(omega), N)

    """
    m = columns.conj().reshape(geom.n_x, geom.n_second_axis, -1)
    vx = steering_matrix(psi, geom.n_x)
    vy = steering_matrix(omega, geom.n_second_axis)
    return np.einsum("xa,yb,xyn->abn", vx, vy, m, optimize=True)


def cosine_grid(size: int) -> npt.NDArray[np.float64]:
    """``size`` uniformly spaced cosine angles covering [-1, 1)."""
    return np.linspace(-1.0, 1.0, size, endpoint=False)


def captured_energy(m: SensingMatrix, psi: npt.ArrayLike, omega: npt.ArrayLike) -> RealMatrix:
    """``||M^H b||^2`` over the outer grid of ``psi`` x ``omega``."""
    projection = project_grid(m.columns, m.spec.uav_geom, psi, omega)
    return np.sum(np.abs(projection) ** 2, axis=2)


def beamspace_map(
    m: SensingMatrix,
    grid_psi: int,
    grid_omega: int | None = None,
) -> tuple[RealMatrix, npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Captured energy normalized to a peak of exactly 1.

    Returns:
        tuple: The map of shape (grid_psi, grid_omega) and the two grid axes

    Raises:
        ValueError: If a grid has fewer than two points

    """
    grid_omega = grid_psi if grid_omega is None else grid_omega
    if min(grid_psi, grid_omega) < 2:
        raise ValueError("Beam-space grid needs at least 2 points per axis")
    psi = cosine_grid(grid_psi)
    omega = cosine_grid(grid_omega)
    energy = captured_energy(m, psi, omega)
    return energy / np.max(energy), psi, omega


def range_energy_fraction(
    m: SensingMatrix,
    sensing_range: SensingRange,
    oversampling: int = 4,
) -> float:
    """Share of grid-summed captured energy that falls inside ``sensing_range``.

    The grid has ``oversampling`` points per beamwidth ``2 / N_axis``.
    """
    geom = m.spec.uav_geom
    psi = cosine_grid(oversampling * geom.n_x)
    omega = cosine_grid(oversampling * geom.n_second_axis)
    energy = captured_energy(m, psi, omega)
    inside = sensing_range.contains(psi[:, np.newaxis], omega[np.newaxis, :])
    return float(np.sum(energy[inside]) / np.sum(energy))
