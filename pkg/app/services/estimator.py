import logging
import math

import numpy as np
import numpy.typing as npt
from scipy.ndimage import maximum_filter

from app.schemas.estimator import AoaEstimate, Candidate, EstimatorConfig, OperationCounter
from app.schemas.geometry import AoaPair
from app.schemas.sensing import SensingMatrix, SensingRange
from app.services.geometry import ComplexVector, RealMatrix, steering, wrap_add, wrap_sub
from app.services.sensing import cosine_grid, project_grid
from app.utils import wrap_cosine
from app.validators import Params

logger = logging.getLogger(__name__)


def _denominator_floor(m: SensingMatrix) -> float:
    # Fraction of the matched projection norm sqrt(N_U)
    return Params.projection_floor * math.sqrt(m.spec.uav_geom.n_elements)


def _factors(aoa: AoaPair, m: SensingMatrix) -> tuple[ComplexVector, ComplexVector]:
    # Uncentered x and y responses; g is invariant to the centering phase
    geom = m.spec.uav_geom
    return steering(aoa.psi, geom.n_x), steering(aoa.omega, geom.n_second_axis)


def objective(
    aoa: AoaPair,
    m: SensingMatrix,
    y: ComplexVector,
    counter: OperationCounter | None = None,
) -> float:
    """Normalized matched-filter energy ``|b^H M y|^2 / ||M^H b||^2``.

    Directions the sensing matrix cannot see (projection norm below the
    floor) score 0.
    """
    vx, vy = _factors(aoa, m)
    projection = m.columns.conj().T @ np.kron(vx, vy)
    if counter is not None:
        counter.add_objective(1, m.columns.size)
    norm = np.linalg.norm(projection)
    if norm < _denominator_floor(m):
        return 0.0
    return float(abs(np.vdot(projection, y)) ** 2 / norm**2)


def objective_gradient(
    aoa: AoaPair,
    m: SensingMatrix,
    y: ComplexVector,
    counter: OperationCounter | None = None,
) -> npt.NDArray[np.float64]:
    """Partial derivatives of :func:`objective` with respect to (psi, omega).

    With ``s = b^H M y`` and ``D = ||M^H b||^2``, each partial is
    ``(2 Re(conj(s) s') D - |s|^2 D') / D^2`` where ``D' = 2 Re(p^H p')``
    and ``p = M^H b``.
    """
    geom = m.spec.uav_geom
    vx, vy = _factors(aoa, m)
    zeta_x = 1j * np.pi * np.arange(geom.n_x)
    zeta_y = 1j * np.pi * np.arange(geom.n_second_axis)
    b = np.kron(vx, vy)
    db = (np.kron(zeta_x * vx, vy), np.kron(vx, zeta_y * vy))

    mh = m.columns.conj().T
    p = mh @ b
    if counter is not None:
        counter.add_gradient(m.columns.size)
    denominator = float(np.vdot(p, p).real)
    if math.sqrt(denominator) < _denominator_floor(m):
        return np.zeros(2)

    my = m.columns @ y
    s = np.vdot(b, my)
    gradient = np.empty(2)
    for axis, derivative in enumerate(db):
        ds = np.vdot(derivative, my)
        dp = mh @ derivative
        d_energy = 2 * (np.conj(s) * ds).real
        d_denominator = 2 * np.vdot(p, dp).real
        gradient[axis] = (d_energy * denominator - abs(s) ** 2 * d_denominator) / denominator**2
    return gradient


def _domain(m: SensingMatrix, cfg: EstimatorConfig) -> SensingRange:
    return cfg.search_domain or m.declared_range


def default_grid_size(width: float, n_axis: int) -> int:
    """Two grid points per beamwidth ``2 / n_axis`` across ``width``."""
    return max(2, math.ceil(2 * width * n_axis))


def axis_grid(center: float, half_width: float, size: int) -> npt.NDArray[np.float64]:
    """Grid over one axis of a search domain; full axes wrap around."""
    if half_width >= 1.0:
        return cosine_grid(size)
    return np.asarray(
        wrap_cosine(center + np.linspace(-half_width, half_width, size)),
        dtype=float,
    )


def objective_grid(
    m: SensingMatrix,
    y: ComplexVector,
    psi: npt.ArrayLike,
    omega: npt.ArrayLike,
    counter: OperationCounter | None = None,
) -> RealMatrix:
    """:func:`objective` over the outer grid of ``psi`` x ``omega``."""
    projection = project_grid(m.columns, m.spec.uav_geom, psi, omega)
    if counter is not None:
        counter.add_objective(projection.shape[0] * projection.shape[1], m.columns.size)
    energy = np.sum(np.abs(projection) ** 2, axis=2)
    matched = np.abs(np.einsum("abn,n->ab", projection.conj(), y)) ** 2
    seen = energy >= _denominator_floor(m) ** 2
    return np.where(seen, matched / np.where(seen, energy, 1.0), 0.0)


def coarse_search(
    m: SensingMatrix,
    y: ComplexVector,
    cfg: EstimatorConfig,
    counter: OperationCounter | None = None,
) -> list[tuple[AoaPair, float]]:
    """Best discrete local maxima of the objective on the coarse grid.

    Peaks are compared over the 8-neighborhood. When the grid has fewer than
    ``n_peaks`` local maxima the largest remaining grid values fill the list.
    Ties keep scan order.
    """
    geom = m.spec.uav_geom
    domain = _domain(m, cfg)
    half_psi, half_omega = domain.half_widths
    size_psi = cfg.grid_psi or default_grid_size(domain.width(0), geom.n_x)
    size_omega = cfg.grid_omega or default_grid_size(domain.width(1), geom.n_second_axis)
    psi = axis_grid(domain.center.psi, half_psi, size_psi)
    omega = axis_grid(domain.center.omega, half_omega, size_omega)

    values = objective_grid(m, y, psi, omega, counter)
    modes = ["wrap" if half >= 1.0 else "nearest" for half in (half_psi, half_omega)]
    peaks = values == maximum_filter(values, size=3, mode=modes)

    flat = values.ravel()
    order = np.argsort(-flat, kind="stable")
    is_peak = peaks.ravel()[order]
    ranked = np.concatenate([order[is_peak], order[~is_peak]])[: cfg.n_peaks]
    rows, cols = np.unravel_index(ranked, values.shape)
    logger.debug(f"Coarse grid {size_psi}x{size_omega}, {int(peaks.sum())} local maxima")
    return [
        (AoaPair(psi=psi[r], omega=omega[c]), float(values[r, c]))
        for r, c in zip(rows, cols, strict=True)
    ]


def default_step_size(m: SensingMatrix, y: ComplexVector) -> float:
    """``1 / (pi^2 N_x N_y ||y||^2)``; zero when there is no signal."""
    energy = float(np.vdot(y, y).real)
    if energy == 0:
        return 0.0
    geom = m.spec.uav_geom
    return 1 / (np.pi**2 * geom.n_x * geom.n_second_axis * energy)


def fine_search(
    candidate: AoaPair,
    m: SensingMatrix,
    y: ComplexVector,
    cfg: EstimatorConfig,
    counter: OperationCounter | None = None,
) -> tuple[AoaPair, float, int]:
    """Wrapped gradient ascent from a coarse candidate.

    Stops when the squared wrapped move falls to ``stop_threshold`` or after
    ``max_iterations``. Five consecutive decreases of the objective halve the
    step; a step below ``min_step_fraction`` of the initial one ends the search.

    Returns:
        tuple: The best point visited, its objective value and the iterations run

    """
    step = cfg.step_size or default_step_size(m, y)
    current = candidate.as_array()
    value = objective(candidate, m, y, counter)
    best, best_value = candidate, value
    if step == 0:
        return best, best_value, 0

    initial_step = step
    decreases = 0
    iterations = 0
    while iterations < cfg.max_iterations:
        iterations += 1
        gradient = objective_gradient(AoaPair.from_array(current), m, y, counter)
        updated = np.asarray(wrap_add(current, step * gradient), dtype=float)
        moved = float(np.sum(np.asarray(wrap_sub(updated, current)) ** 2))
        current = updated
        point = AoaPair.from_array(current)
        new_value = objective(point, m, y, counter)

        if new_value > best_value:
            best, best_value = point, new_value
        decreases = decreases + 1 if new_value < value else 0
        value = new_value
        if decreases >= Params.divergence_patience:
            step /= 2
            decreases = 0
            logger.debug(f"Objective fell {Params.divergence_patience} times, step now {step}")
            if step < Params.min_step_fraction * initial_step:
                break
        if moved <= cfg.stop_threshold:
            break
    return best, best_value, iterations


def estimate_aoa(
    m: SensingMatrix,
    y: ComplexVector,
    cfg: EstimatorConfig,
    counter: OperationCounter | None = None,
) -> AoaEstimate:
    """Coarse search, refine every candidate, keep the refined point with the largest g."""
    candidates = []
    for start, start_value in coarse_search(m, y, cfg, counter):
        refined, refined_value, iterations = fine_search(start, m, y, cfg, counter)
        candidates.append(
            Candidate(
                start=start,
                start_value=start_value,
                refined=refined,
                refined_value=refined_value,
                iterations=iterations,
            ),
        )
    best = max(candidates, key=lambda c: c.refined_value)
    return AoaEstimate(
        aoa=best.refined,
        objective=best.refined_value,
        iterations=best.iterations,
        candidates=candidates,
    )


def brute_force_oracle(
    m: SensingMatrix,
    y: ComplexVector,
    points_per_axis: tuple[int, int] | None = None,
) -> AoaPair:
    """Exhaustive argmax of the objective over a dense grid of the full domain.

    The default grid has 8 points per beamwidth. Ties go to the first point in
    scan order (psi-major).
    """
    geom = m.spec.uav_geom
    size_psi, size_omega = points_per_axis or (8 * geom.n_x, 8 * geom.n_second_axis)
    psi = cosine_grid(size_psi)
    omega = cosine_grid(size_omega)
    values = objective_grid(m, y, psi, omega)
    r, c = np.unravel_index(np.argmax(values), values.shape)
    return AoaPair(psi=psi[r], omega=omega[c])
