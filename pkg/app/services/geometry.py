import logging
import math

import numpy as np
import numpy.typing as npt

from app.exceptions import GeometryError
from app.schemas.geometry import AoaPair, Attitude, Direction, Position3, UpaGeometry
from app.utils import FloatLike
from app.validators import Params

logger = logging.getLogger(__name__)

ComplexVector = npt.NDArray[np.complex128]
RealMatrix = npt.NDArray[np.float64]


def _wrap_shifted(shifted: FloatLike) -> FloatLike:
    # Shifted value is (difference + 1); fold onto [0, 2) then back to [-1, 1).
    # A tiny negative remainder can round up to exactly 2.
    if np.ndim(shifted):
        folded = np.mod(shifted, 2.0)
        return np.where(folded >= 2.0, 0.0, folded) - 1.0
    folded = float(shifted) % 2.0
    return (0.0 if folded >= 2.0 else folded) - 1.0


def wrap_sub(a: FloatLike, b: FloatLike) -> FloatLike:
    """Cosine-angle subtraction modulo 2, result in [-1, 1)."""
    if np.ndim(a) or np.ndim(b):
        return _wrap_shifted(np.asarray(a, dtype=float) - b + 1.0)
    return _wrap_shifted(a - b + 1.0)


def wrap_add(a: FloatLike, b: FloatLike) -> FloatLike:
    """Cosine-angle addition modulo 2, result in [-1, 1)."""
    if np.ndim(a) or np.ndim(b):
        return _wrap_shifted(np.asarray(a, dtype=float) + b + 1.0)
    return _wrap_shifted(a + b + 1.0)


def yaw_matrix(alpha: float) -> RealMatrix:
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def pitch_matrix(beta: float) -> RealMatrix:
    c, s = math.cos(beta), math.sin(beta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def roll_matrix(gamma: float) -> RealMatrix:
    c, s = math.cos(gamma), math.sin(gamma)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_matrix(att: Attitude) -> RealMatrix:
    """Closed-form yaw-pitch-roll rotation ``R_yaw @ R_pitch @ R_roll``."""
    ca, sa = math.cos(att.yaw), math.sin(att.yaw)
    cb, sb = math.cos(att.pitch), math.sin(att.pitch)
    cg, sg = math.cos(att.roll), math.sin(att.roll)
    return np.array(
        [
            [ca * cb, ca * sb * sg - sa * cg, ca * sb * cg + sa * sg],
            [sa * cb, sa * sb * sg + ca * cg, sa * sb * cg - ca * sg],
            [-sb, cb * sg, cb * cg],
        ],
    )


def _element_grid(geom: UpaGeometry) -> tuple[npt.NDArray[np.float64], ...]:
    # Row-major over (first-axis index, second-axis index): matches the
    # Kronecker order v(first) (x) v(second)
    first, second = np.meshgrid(
        np.arange(geom.n_x, dtype=float),
        np.arange(geom.n_second_axis, dtype=float),
        indexing="ij",
    )
    return first.ravel(), second.ravel()


def bs_antenna_offsets(geom: UpaGeometry) -> RealMatrix:
    """Element offsets of the BS array in the x-z plane, one row per element.

    Raises:
        ValueError: If the geometry uses the centered (UAV) convention

    """
    if geom.centered:
        raise ValueError("BS offsets require an uncentered geometry")
    x, z = _element_grid(geom)
    offsets = np.zeros((geom.n_elements, 3))
    offsets[:, 0] = x
    offsets[:, 2] = z
    return offsets * geom.wavelength / 2


def uav_antenna_offsets(geom: UpaGeometry) -> RealMatrix:
    """Body-frame element offsets of the centered UAV array, one row per element.

    Raises:
        ValueError: If the geometry uses the uncentered (BS) convention

    """
    if not geom.centered:
        raise ValueError("UAV offsets require a centered geometry")
    x, y = _element_grid(geom)
    offsets = np.zeros((geom.n_elements, 3))
    offsets[:, 0] = x - (geom.n_x - 1) / 2
    offsets[:, 1] = y - (geom.n_second_axis - 1) / 2
    return offsets * geom.wavelength / 2


def direction_from_vector(vector: npt.ArrayLike) -> Direction:
    """Build a Direction from an arbitrary non-zero vector pointing UAV -> BS."""
    vector = np.asarray(vector, dtype=float)
    distance = float(np.linalg.norm(vector))
    if distance < Params.coincident_distance_m:
        raise GeometryError("BS and UAV positions coincide")
    e = vector / distance
    horizontal = math.hypot(e[0], e[1])
    elevation = math.atan2(e[2], horizontal)
    azimuth = math.atan2(e[1], e[0]) if horizontal > Params.unit_tolerance else 0.0
    return Direction(
        e=(float(e[0]), float(e[1]), float(e[2])),
        elevation=elevation,
        azimuth=azimuth,
        distance=distance,
    )


def direction_between(p_b: Position3, p_u: Position3) -> Direction:
    """Direction vector, spherical angles and distance from the UAV to the BS.

    Raises:
        GeometryError: If the two positions coincide

    """
    return direction_from_vector(p_b.as_array() - p_u.as_array())


def aoa_bs(direction: Direction) -> AoaPair:
    """Cosine AoD at the BS: the x and z components of the direction."""
    e = direction.as_array()
    return AoaPair(psi=e[0], omega=e[2])


def body_direction(direction: Direction, att: Attitude) -> npt.NDArray[np.float64]:
    """The LoS direction expressed in the UAV body frame, ``R.T @ e``."""
    return rotation_matrix(att).T @ direction.as_array()


def aoa_uav(direction: Direction, att: Attitude) -> AoaPair:
    """Cosine AoA at the UAV: first two body-frame components of the direction."""
    body = body_direction(direction, att)
    return AoaPair(psi=body[0], omega=body[1])


def aoa_uav_closed_form(direction: Direction, att: Attitude) -> AoaPair:
    """Trigonometric form of the UAV cosine AoA in terms of (phi, theta)."""
    ca, sa = math.cos(att.yaw), math.sin(att.yaw)
    cb, sb = math.cos(att.pitch), math.sin(att.pitch)
    cg, sg = math.cos(att.roll), math.sin(att.roll)
    ex = math.cos(direction.elevation) * math.cos(direction.azimuth)
    ey = math.cos(direction.elevation) * math.sin(direction.azimuth)
    ez = math.sin(direction.elevation)
    psi = ca * cb * ex + sa * cb * ey - sb * ez
    omega = (ca * sb * sg - sa * cg) * ex + (sa * sb * sg + ca * cg) * ey + cb * sg * ez
    return AoaPair(psi=psi, omega=omega)


def steering(psi: float, n: int, *, centered: bool = False) -> ComplexVector:
    """Uniform linear array response ``exp(j*pi*k*psi)`` for k = 0..n-1.

    The centered form is multiplied by ``exp(-j*pi*psi*(n-1)/2)`` so that the
    phase reference sits at the array center.
    """
    phase = np.pi * psi * np.arange(n)
    if centered:
        phase = phase - np.pi * psi * (n - 1) / 2
    return np.exp(1j * phase)


def array_response(aoa: AoaPair, geom: UpaGeometry) -> ComplexVector:
    """UPA response as the Kronecker product of the two axis responses."""
    return np.kron(
        steering(aoa.psi, geom.n_x, centered=geom.centered),
        steering(aoa.omega, geom.n_second_axis, centered=geom.centered),
    )


def exact_array_response(
    offsets: RealMatrix,
    rotation: RealMatrix | None,
    e: npt.ArrayLike,
    wavelength: float,
) -> ComplexVector:
    """Element-wise array response ``exp(j*2*pi*(R a)^T e / wavelength)``.

    Brute-force counterpart of :func:`array_response`, used as an oracle.
    """
    rotated = offsets if rotation is None else offsets @ np.asarray(rotation).T
    return np.exp(1j * 2 * np.pi * (rotated @ np.asarray(e, dtype=float)) / wavelength)
