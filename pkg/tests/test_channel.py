import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError

from app.enums import Method, Side
from app.exceptions import GeometryError
from app.schemas.channel import Beamformer
from app.schemas.geometry import AoaPair, Attitude, Position3
from app.schemas.sensing import METHOD_PRESETS
from app.services.channel import (
    beamformer,
    beamforming_gain,
    data_rate,
    dirichlet_ratio,
    effective_coeff,
    effective_coeff_closed_form,
    exact_channel_matrix,
    los_channel,
    max_received_power_dbm,
    measure,
    measure_batch,
    path_loss_db,
    rank1_channel_matrix,
    received_power_dbm,
)
from app.services.scenario import REFERENCE_SCENARIOS
from app.services.sensing import sensing_matrix

SCENARIO_1 = REFERENCE_SCENARIOS[1]


@pytest.fixture
def channel(bs_geom, uav_geom):
    return los_channel(SCENARIO_1.position, SCENARIO_1.desired, bs_geom, uav_geom)


def matched_beams(ch):
    return (
        beamformer(ch.aoa_uav, ch.uav_geom, Side.uav),
        beamformer(ch.aoa_bs, ch.bs_geom, Side.bs),
    )


def test_coefficient_magnitude(channel):
    assert abs(channel.coeff) == pytest.approx(3e8 / 28e9 / (4 * math.pi * 150), rel=1e-12)
    assert abs(channel.coeff) == pytest.approx(5.684e-6, rel=1e-3)


def test_near_field_positions_are_rejected(bs_geom, uav_geom):
    with pytest.raises(GeometryError):
        los_channel(Position3(x=3.0, y=4.0, z=0.0), Attitude(), bs_geom, uav_geom)


def test_rank1_model_matches_exact_channel(rng, bs_geom, uav_geom):
    positions = [SCENARIO_1.position]
    for _ in range(4):
        vector = rng.standard_normal(3)
        distance = rng.uniform(100, 200)
        positions.append(Position3.from_array(distance * vector / np.linalg.norm(vector)))

    for position in positions:
        att = Attitude.from_array(rng.uniform([-3.0, -0.3, -0.3], [3.0, 0.3, 0.3]))
        ch = los_channel(position, att, bs_geom, uav_geom)
        m, f = matched_beams(ch)
        exact = exact_channel_matrix(position, att, bs_geom, uav_geom)
        approx = rank1_channel_matrix(ch)
        error = abs(np.vdot(m.weights, (exact - approx) @ f.weights))
        assert error / abs(np.vdot(m.weights, exact @ f.weights)) < 0.02


def test_matched_gain_and_path_loss(channel):
    m, f = matched_beams(channel)
    gain = beamforming_gain(m, channel, f)

    assert gain == pytest.approx(256 * 256, rel=1e-9)
    loss = path_loss_db(gain, channel.wavelength, channel.distance)
    assert loss == pytest.approx(56.74, abs=0.01)
    assert path_loss_db(1.0, channel.wavelength, channel.distance) == pytest.approx(104.9, abs=0.05)
    assert path_loss_db(0.0, channel.wavelength, channel.distance) == math.inf


def test_mismatched_gain_is_bounded(channel, rng):
    for _ in range(20):
        pointing = AoaPair.from_array(channel.aoa_uav.as_array() + rng.uniform(-0.2, 0.2, 2))
        m = beamformer(pointing, channel.uav_geom, Side.uav)
        _, f = matched_beams(channel)
        assert beamforming_gain(m, channel, f) <= 256 * 256 * (1 + 1e-12)


def test_beamformer_weights_are_validated_and_frozen(uav_geom):
    m = beamformer(AoaPair(psi=0.1, omega=-0.3), uav_geom, Side.uav)
    assert np.linalg.norm(m.weights) == pytest.approx(1.0)
    with pytest.raises(ValueError, match="read-only"):
        m.weights[0] = 0
    with pytest.raises(ValidationError):
        Beamformer(weights=np.ones(4, dtype=complex), side=Side.uav, pointing=m.pointing)


def test_dirichlet_ratio_limits():
    assert dirichlet_ratio(0.0, 16) == pytest.approx(16.0)
    assert dirichlet_ratio(1e-13, 16) == pytest.approx(16.0)
    assert dirichlet_ratio(2 / 16, 16) == pytest.approx(0.0, abs=1e-12)
    assert_allclose(dirichlet_ratio(np.array([0.0, 0.25]), 4), [4.0, 1 / math.sin(math.pi / 8)])


def test_effective_coefficient_closed_form(channel, rng):
    assert abs(effective_coeff(channel, channel.aoa_bs)) == pytest.approx(
        abs(channel.coeff) * 16, rel=1e-12,
    )
    for _ in range(50):
        pointing = AoaPair.from_array(channel.aoa_bs.as_array() + rng.uniform(-0.3, 0.3, 2))
        inner = effective_coeff(channel, pointing)
        closed = effective_coeff_closed_form(channel, pointing)
        assert abs(inner - closed) / abs(channel.coeff) < 1e-9


def test_noiseless_measurement(channel, rng):
    m, f = matched_beams(channel)
    y = measure(channel, f, m, 0.04, 0.0, rng)
    assert y == pytest.approx(0.2 * channel.coeff * 256, rel=1e-9)


def test_batch_measurement_matches_single_samples(channel, uav_geom, rng):
    spec = METHOD_PRESETS[Method.partial_type2].spec(5, channel.aoa_uav, uav_geom)
    matrix = sensing_matrix(spec, rng)
    _, f = matched_beams(channel)

    batch = measure_batch(channel, f, matrix.columns, 1.0, 0.0, rng)
    single = [
        measure(
            channel,
            f,
            Beamformer(weights=matrix.columns[:, i].copy(), side=Side.uav, pointing=spec.center),
            1.0,
            0.0,
            rng,
        )
        for i in range(5)
    ]
    assert_allclose(batch, single, rtol=1e-12)


def test_measurement_noise_power(channel):
    m, f = matched_beams(channel)
    columns = np.tile(m.weights[:, np.newaxis], (1, 5000))
    y = measure_batch(channel, f, columns, 0.0, 2.0, np.random.default_rng(7))
    assert np.mean(np.abs(y) ** 2) == pytest.approx(2.0, rel=0.06)


def test_received_power_and_rate(channel):
    m, f = matched_beams(channel)
    assert received_power_dbm(channel, m, f, 16.0) == pytest.approx(
        max_received_power_dbm(channel, 16.0), abs=1e-9,
    )
    assert max_received_power_dbm(channel, 16.0) == pytest.approx(16.0 - 56.74, abs=0.01)

    snr = 0.04 * 65536 * channel.free_space_amplitude**2 / 4e-12
    assert data_rate(channel, m, f, 0.04, 4e-12) == pytest.approx(math.log2(1 + snr))
