import logging

import numpy as np
import numpy.typing as npt

from app.schemas.geometry import AoaPair, Attitude, Direction
from app.schemas.jitter import AoaDistribution, JitterModel
from app.services.geometry import RealMatrix, aoa_bs, aoa_uav

logger = logging.getLogger(__name__)


def jacobian(att: Attitude, direction: Direction) -> RealMatrix:
    """Partial derivatives of the UAV cosine AoA with respect to (yaw, pitch, roll).

    Row 0 is ``d psi``, row 1 is ``d omega``. ``d psi / d roll`` is identically zero.
    """
    ca, sa = np.cos(att.yaw), np.sin(att.yaw)
    cb, sb = np.cos(att.pitch), np.sin(att.pitch)
    cg, sg = np.cos(att.roll), np.sin(att.roll)
    ex, ey, ez = direction.as_array()
    return np.array(
        [
            [
                -sa * cb * ex + ca * cb * ey,
                -ca * sb * ex - sa * sb * ey - cb * ez,
                0.0,
            ],
            [
                (-sa * sb * sg - ca * cg) * ex + (ca * sb * sg - sa * cg) * ey,
                ca * cb * sg * ex + sa * cb * sg * ey - sb * sg * ez,
                (ca * sb * cg + sa * sg) * ex + (sa * sb * cg - ca * sg) * ey + cb * cg * ez,
            ],
        ],
    )


def aoa_distribution(
    desired: Attitude,
    direction: Direction,
    jm: JitterModel,
) -> AoaDistribution:
    """Linearized Gaussian law of the UAV cosine AoA around the desired attitude."""
    j = jacobian(desired, direction)
    covariance = j @ np.diag(jm.variances()) @ j.T
    covariance = (covariance + covariance.T) / 2
    mean = aoa_uav(direction, desired).as_array()
    logger.debug(f"AoA distribution at {desired}: mean={mean}, cov={covariance.tolist()}")
    return AoaDistribution(mean=mean, covariance=covariance)


def sample_deltas(
    jm: JitterModel,
    rng: np.random.Generator,
    n: int | None = None,
) -> npt.NDArray[np.float64]:
    """Independent Gaussian attitude perturbations, shape (3,) or (n, 3)."""
    size = 3 if n is None else (n, 3)
    return rng.standard_normal(size) * np.sqrt(jm.variances())


def sample_attitude(desired: Attitude, jm: JitterModel, rng: np.random.Generator) -> Attitude:
    """Desired attitude plus one draw of independent per-axis jitter."""
    return Attitude.from_array(desired.as_array() + sample_deltas(jm, rng))


def linearized_aoa(
    desired: Attitude,
    direction: Direction,
    deltas: npt.ArrayLike,
) -> AoaPair:
    """First-order Taylor approximation ``mu + J @ deltas`` of the UAV AoA."""
    mean = aoa_uav(direction, desired).as_array()
    return AoaPair.from_array(mean + jacobian(desired, direction) @ np.asarray(deltas, dtype=float))


def aoa_uav_batch(direction: Direction, angles: npt.ArrayLike) -> RealMatrix:
    """Exact UAV cosine AoA for many attitudes at once.

    Args:
        direction: LoS direction from the UAV to the BS
        angles: Array of shape (n, 3) with yaw, pitch and roll per row

    Returns:
        RealMatrix: Array of shape (n, 2) with (psi, omega) per row, not wrapped

    """
    angles = np.atleast_2d(np.asarray(angles, dtype=float))
    ca, sa = np.cos(angles[:, 0]), np.sin(angles[:, 0])
    cb, sb = np.cos(angles[:, 1]), np.sin(angles[:, 1])
    cg, sg = np.cos(angles[:, 2]), np.sin(angles[:, 2])
    ex, ey, ez = direction.as_array()
    psi = ca * cb * ex + sa * cb * ey - sb * ez
    omega = (ca * sb * sg - sa * cg) * ex + (sa * sb * sg + ca * cg) * ey + cb * sg * ez
    return np.column_stack([psi, omega])


def empirical_aoa_statistics(
    desired: Attitude,
    direction: Direction,
    jm: JitterModel,
    n_samples: int,
    rng: np.random.Generator,
) -> AoaDistribution:
    """Monte-Carlo mean and covariance of the exact UAV AoA under jitter."""
    samples = aoa_uav_batch(direction, desired.as_array() + sample_deltas(jm, rng, n_samples))
    covariance = np.cov(samples, rowvar=False)
    return AoaDistribution(
        mean=samples.mean(axis=0),
        covariance=(covariance + covariance.T) / 2,
    )


def aoa_time_series(
    desired: Attitude,
    direction: Direction,
    jm: JitterModel,
    n_steps: int,
    rng: np.random.Generator,
) -> RealMatrix:
    """I.i.d. jittered samples of (psi_u, omega_u, psi_b, omega_b), one row per step.

    The BS columns are constant: jitter moves only the UAV-side angles.
    """
    uav = aoa_uav_batch(direction, desired.as_array() + sample_deltas(jm, rng, n_steps))
    bs = np.broadcast_to(aoa_bs(direction).as_array(), (n_steps, 2))
    return np.column_stack([uav, bs])
