import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.spatial.transform import Rotation

from app.enums import Method
from app.schemas.geometry import ORIGIN, AoaPair, Attitude, Position3, UpaGeometry
from app.schemas.harness import CheckResult
from app.schemas.sensing import METHOD_PRESETS
from app.services.channel import effective_coeff, effective_coeff_closed_form, los_channel
from app.services.estimator import objective, objective_gradient
from app.services.geometry import (
    aoa_uav,
    aoa_uav_closed_form,
    array_response,
    bs_antenna_offsets,
    direction_between,
    exact_array_response,
    pitch_matrix,
    roll_matrix,
    rotation_matrix,
    uav_antenna_offsets,
    yaw_matrix,
)
from app.services.jitter import aoa_uav_batch, jacobian
from app.services.sensing import sensing_matrix
from app.utils import trial_rng

logger = logging.getLogger(__name__)

WAVELENGTH = 3e8 / 28e9
FD_STEP = 1e-6

# Finite-difference gradient tolerance: rtol on the gradient plus atol in units of ||y||^2
GRADIENT_RTOL = 1e-6
GRADIENT_ATOL = 1e-6


def _random_attitude(rng: np.random.Generator) -> Attitude:
    return Attitude(
        yaw=rng.uniform(-math.pi, math.pi),
        pitch=rng.uniform(-0.5, 0.5),
        roll=rng.uniform(-0.5, 0.5),
    )


def _random_position(rng: np.random.Generator) -> Position3:
    vector = rng.standard_normal(3)
    return Position3.from_array(rng.uniform(50.0, 300.0) * vector / np.linalg.norm(vector))


def check_rotation(rng: np.random.Generator) -> float:
    att = _random_attitude(rng)
    r = rotation_matrix(att)
    reference = Rotation.from_euler("ZYX", [att.yaw, att.pitch, att.roll]).as_matrix()
    composed = yaw_matrix(att.yaw) @ pitch_matrix(att.pitch) @ roll_matrix(att.roll)
    return float(
        max(
            np.max(np.abs(r @ r.T - np.eye(3))),
            np.max(np.abs(r - reference)),
            np.max(np.abs(r - composed)),
        ),
    )


def check_closed_form_aoa(rng: np.random.Generator) -> float:
    direction = direction_between(ORIGIN, _random_position(rng))
    att = _random_attitude(rng)
    exact = aoa_uav(direction, att).as_array()
    return float(np.max(np.abs(exact - aoa_uav_closed_form(direction, att).as_array())))


def check_kronecker(rng: np.random.Generator) -> float:
    p_u = _random_position(rng)
    att = _random_attitude(rng)
    bs_geom = UpaGeometry.bs(4, 4, WAVELENGTH)
    uav_geom = UpaGeometry.uav(4, 4, WAVELENGTH)
    ch = los_channel(p_u, att, bs_geom, uav_geom)
    e = direction_between(ORIGIN, p_u).as_array()
    uav_offsets = uav_antenna_offsets(uav_geom)
    uav_exact = exact_array_response(uav_offsets, rotation_matrix(att), e, WAVELENGTH)
    bs_exact = exact_array_response(bs_antenna_offsets(bs_geom), None, e, WAVELENGTH)
    return float(
        max(
            np.max(np.abs(uav_exact - array_response(ch.aoa_uav, uav_geom))),
            np.max(np.abs(bs_exact - array_response(ch.aoa_bs, bs_geom))),
        ),
    )


def check_jacobian(rng: np.random.Generator) -> float:
    direction = direction_between(ORIGIN, _random_position(rng))
    att = _random_attitude(rng)
    steps = FD_STEP * np.eye(3)
    upper = aoa_uav_batch(direction, att.as_array() + steps)
    lower = aoa_uav_batch(direction, att.as_array() - steps)
    numeric = ((upper - lower) / (2 * FD_STEP)).T
    return float(np.max(np.abs(numeric - jacobian(att, direction))))


def check_gradient(rng: np.random.Generator) -> float:
    uav_geom = UpaGeometry.uav(4, 4, WAVELENGTH)
    spec = METHOD_PRESETS[Method.fully_random].spec(8, AoaPair(psi=0.0, omega=0.0), uav_geom)
    m = sensing_matrix(spec, rng)
    y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    aoa = AoaPair(psi=rng.uniform(-0.9, 0.9), omega=rng.uniform(-0.9, 0.9))
    analytic = objective_gradient(aoa, m, y)
    numeric = np.array(
        [
            objective(AoaPair(psi=aoa.psi + FD_STEP, omega=aoa.omega), m, y)
            - objective(AoaPair(psi=aoa.psi - FD_STEP, omega=aoa.omega), m, y),
            objective(AoaPair(psi=aoa.psi, omega=aoa.omega + FD_STEP), m, y)
            - objective(AoaPair(psi=aoa.psi, omega=aoa.omega - FD_STEP), m, y),
        ],
    ) / (2 * FD_STEP)
    excess = np.abs(numeric - analytic) - GRADIENT_RTOL * np.abs(analytic)
    return max(float(np.max(excess)), 0.0) / float(np.vdot(y, y).real)


def check_effective_coeff(rng: np.random.Generator) -> float:
    bs_geom = UpaGeometry.bs(16, 16, WAVELENGTH)
    uav_geom = UpaGeometry.uav(16, 16, WAVELENGTH)
    ch = los_channel(_random_position(rng), _random_attitude(rng), bs_geom, uav_geom)
    pointing = AoaPair.from_array(ch.aoa_bs.as_array() + rng.uniform(-0.2, 0.2, 2))
    inner = effective_coeff(ch, pointing)
    closed = effective_coeff_closed_form(ch, pointing)
    return abs(inner - closed) / abs(ch.coeff)


CHECKS: dict[str, tuple[Callable[[np.random.Generator], float], float]] = {
    "rotation": (check_rotation, 1e-12),
    "closed_form_aoa": (check_closed_form_aoa, 1e-12),
    "kronecker_response": (check_kronecker, 1e-10),
    "jacobian": (check_jacobian, 1e-6),
    "objective_gradient": (check_gradient, GRADIENT_ATOL),
    "effective_coeff": (check_effective_coeff, 1e-9),
}


def run_selftest(seed: int, n_instances: int = 20) -> list[CheckResult]:
    """Run every oracle check on ``n_instances`` random instances.

    Check ``k`` draws instance ``i`` from the generator stream ``(seed, k, i)``.
    """
    results = []
    for index, (name, (check, tolerance)) in enumerate(CHECKS.items()):
        worst = max(check(trial_rng(seed, index, i)) for i in range(n_instances))
        passed = worst <= tolerance
        results.append(CheckResult(name=name, passed=passed, max_error=worst, tolerance=tolerance))
        if passed:
            logger.info(f"Self-test {name}: max error {worst:.3g} (tolerance {tolerance:g})")
        else:
            logger.error(f"Self-test {name} FAILED: max error {worst:.3g} > {tolerance:g}")
    return results
