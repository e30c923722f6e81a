import logging
import math

import numpy as np
import numpy.typing as npt

from app.enums import Side
from app.exceptions import GeometryError
from app.schemas.channel import Beamformer, LosChannel
from app.schemas.geometry import ORIGIN, AoaPair, Attitude, Position3, UpaGeometry
from app.services.geometry import (
    ComplexVector,
    aoa_bs,
    aoa_uav,
    array_response,
    bs_antenna_offsets,
    direction_between,
    rotation_matrix,
    steering,
    uav_antenna_offsets,
)
from app.utils import FloatLike
from app.validators import Params

logger = logging.getLogger(__name__)

ComplexMatrix = npt.NDArray[np.complex128]


def los_channel(
    p_u: Position3,
    att: Attitude,
    bs_geom: UpaGeometry,
    uav_geom: UpaGeometry,
) -> LosChannel:
    """Build the rank-1 far-field LoS channel between the BS and the UAV.

    Args:
        p_u: UAV position, BS at the origin
        att: UAV attitude
        bs_geom: BS array geometry
        uav_geom: UAV array geometry

    Returns:
        LosChannel: Channel with ``coeff = wavelength/(4 pi d) * exp(-j 2 pi d / wavelength)``

    Raises:
        GeometryError: If the UAV is closer than the far-field minimum distance

    """
    direction = direction_between(ORIGIN, p_u)
    if direction.distance < Params.far_field_min_distance_m:
        raise GeometryError(
            f"UAV at {direction.distance:.3f} m is inside the far-field minimum "
            f"of {Params.far_field_min_distance_m} m",
        )
    wavelength = bs_geom.wavelength
    d = direction.distance
    coeff = wavelength / (4 * math.pi * d) * np.exp(-2j * math.pi * d / wavelength)
    return LosChannel(
        coeff=complex(coeff),
        aoa_bs=aoa_bs(direction),
        aoa_uav=aoa_uav(direction, att),
        distance=d,
        bs_geom=bs_geom,
        uav_geom=uav_geom,
    )


def exact_channel_matrix(
    p_u: Position3,
    att: Attitude,
    bs_geom: UpaGeometry,
    uav_geom: UpaGeometry,
) -> ComplexMatrix:
    """Element-wise LoS channel from exact inter-antenna distances.

    Entry ``(k, i)`` couples UAV element ``k`` with BS element ``i``. No Taylor
    approximation is made, so this is the oracle for :func:`los_channel`.

    Raises:
        GeometryError: If the UAV is closer than the far-field minimum distance

    """
    distance = p_u.norm
    if distance < Params.far_field_min_distance_m:
        raise GeometryError(
            f"UAV at {distance:.3f} m is inside the far-field minimum "
            f"of {Params.far_field_min_distance_m} m",
        )
    wavelength = bs_geom.wavelength
    bs_points = bs_antenna_offsets(bs_geom)
    uav_points = p_u.as_array() + uav_antenna_offsets(uav_geom) @ rotation_matrix(att).T
    d = np.linalg.norm(bs_points[np.newaxis, :, :] - uav_points[:, np.newaxis, :], axis=2)
    return wavelength / (4 * np.pi * d) * np.exp(-2j * np.pi * d / wavelength)


def bs_response(ch: LosChannel) -> ComplexVector:
    return array_response(ch.aoa_bs, ch.bs_geom)


def uav_response(ch: LosChannel) -> ComplexVector:
    return array_response(ch.aoa_uav, ch.uav_geom)


def rank1_channel_matrix(ch: LosChannel) -> ComplexMatrix:
    """Dense ``coeff * v_uav @ v_bs^H``; only for comparisons against the oracle."""
    return ch.coeff * np.outer(uav_response(ch), bs_response(ch).conj())


def beamformer(pointing: AoaPair, geom: UpaGeometry, side: Side) -> Beamformer:
    """Unit-norm analog beam steered at ``pointing``."""
    weights = array_response(pointing, geom) / math.sqrt(geom.n_elements)
    return Beamformer(weights=weights, side=side, pointing=pointing)


def beamforming_gain(m: Beamformer, ch: LosChannel, f: Beamformer) -> float:
    """Product of the receive and transmit array gains in the LoS direction.

    Computed from the two rank-1 factors, the channel matrix is never formed.
    """
    receive = np.vdot(m.weights, uav_response(ch))
    transmit = np.vdot(bs_response(ch), f.weights)
    return float(abs(receive) ** 2 * abs(transmit) ** 2)


def path_loss_db(gain: float, wavelength: float, distance: float) -> float:
    """Free-space path loss with beamforming gain, ``-10 log10(G lambda^2/(4 pi d)^2)``.

    A zero gain gives an infinite loss.
    """
    if gain <= 0:
        return math.inf
    return -10 * math.log10(gain * wavelength**2 / (4 * math.pi * distance) ** 2)


def dirichlet_ratio(delta: FloatLike, n: int) -> FloatLike:
    """Array factor ``sin(pi n delta / 2) / sin(pi delta / 2)``.

    Near the poles of the denominator the L'Hopital limit
    ``n cos(pi n delta / 2) / cos(pi delta / 2)`` is used instead.
    """
    delta = np.asarray(delta, dtype=float)
    numerator = np.sin(np.pi * n * delta / 2)
    denominator = np.sin(np.pi * delta / 2)
    near_pole = np.abs(denominator) < 1e-12
    safe = np.where(near_pole, 1.0, denominator)
    limit = n * np.cos(np.pi * n * delta / 2) / np.cos(np.pi * delta / 2)
    result = np.where(near_pole, limit, numerator / safe)
    if result.ndim == 0:
        return float(result)
    return result


def effective_coeff(ch: LosChannel, bs_pointing: AoaPair) -> complex:
    """Channel coefficient seen after the BS beam, ``coeff * v_bs^H f``."""
    f = beamformer(bs_pointing, ch.bs_geom, Side.bs)
    return complex(ch.coeff * np.vdot(bs_response(ch), f.weights))


def effective_coeff_closed_form(ch: LosChannel, bs_pointing: AoaPair) -> complex:
    """Closed form of :func:`effective_coeff` as two Dirichlet kernels.

    With ``delta = true - pointing`` per axis, each axis contributes
    ``exp(-j pi delta (n - 1) / 2) * D_n(delta)``.
    """
    value = complex(ch.coeff) / math.sqrt(ch.bs_geom.n_elements)
    for delta, n in (
        (ch.aoa_bs.psi - bs_pointing.psi, ch.bs_geom.n_x),
        (ch.aoa_bs.omega - bs_pointing.omega, ch.bs_geom.n_second_axis),
    ):
        phase = np.exp(-1j * math.pi * delta * (n - 1) / 2)
        value *= complex(phase * dirichlet_ratio(delta, n))
    return value


def _complex_noise(
    rng: np.random.Generator,
    noise_power_w: float,
    size: int | None = None,
) -> complex | ComplexVector:
    # Circularly-symmetric complex Gaussian with variance noise_power_w
    draws = rng.standard_normal(2 if size is None else (size, 2))
    noise = math.sqrt(noise_power_w / 2) * (draws[..., 0] + 1j * draws[..., 1])
    return complex(noise) if size is None else noise


def measure(
    ch: LosChannel,
    f: Beamformer,
    m: Beamformer,
    tx_power_w: float,
    noise_power_w: float,
    rng: np.random.Generator,
) -> complex:
    """One received pilot sample ``sqrt(P) * m^H H f + noise``.

    Noise is drawn in the post-combining domain; this is exact because ``m`` has
    unit norm. The generator is advanced even when ``noise_power_w`` is zero.
    """
    signal = (
        math.sqrt(tx_power_w)
        * ch.coeff
        * np.vdot(m.weights, uav_response(ch))
        * np.vdot(bs_response(ch), f.weights)
    )
    return complex(signal) + _complex_noise(rng, noise_power_w)


def measure_batch(
    ch: LosChannel,
    f: Beamformer,
    columns: ComplexMatrix,
    tx_power_w: float,
    noise_power_w: float,
    rng: np.random.Generator,
) -> ComplexVector:
    """Received samples for every column of a sensing matrix ``M`` (N_U x N).

    Statistically identical to calling :func:`measure` once per column.
    """
    transmit = np.vdot(bs_response(ch), f.weights)
    signal = math.sqrt(tx_power_w) * ch.coeff * transmit * (columns.conj().T @ uav_response(ch))
    return signal + _complex_noise(rng, noise_power_w, size=columns.shape[1])


def received_power_dbm(
    ch: LosChannel,
    m: Beamformer,
    f: Beamformer,
    tx_power_dbm: float,
) -> float:
    """Noise-free received power ``tx + 20 log10 |m^H H f|`` in dBm."""
    amplitude = abs(
        ch.coeff * np.vdot(m.weights, uav_response(ch)) * np.vdot(bs_response(ch), f.weights),
    )
    if amplitude == 0:
        return -math.inf
    return tx_power_dbm + 20 * math.log10(amplitude)


def max_received_power_dbm(ch: LosChannel, tx_power_dbm: float) -> float:
    """Received power with both beams perfectly matched."""
    gain = math.sqrt(ch.bs_geom.n_elements * ch.uav_geom.n_elements)
    return tx_power_dbm + 20 * math.log10(gain * ch.free_space_amplitude)


def data_rate(
    ch: LosChannel,
    m: Beamformer,
    f: Beamformer,
    tx_power_w: float,
    noise_power_w: float,
) -> float:
    """Shannon rate ``log2(1 + P G (lambda/(4 pi d))^2 / noise)`` in bit/s/Hz."""
    snr = tx_power_w * beamforming_gain(m, ch, f) * ch.free_space_amplitude**2 / noise_power_w
    return math.log2(1 + snr)
