import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation

from app.exceptions import GeometryError
from app.schemas.geometry import ORIGIN, AoaPair, Attitude, Position3, UpaGeometry
from app.services.geometry import (
    aoa_bs,
    aoa_uav,
    aoa_uav_closed_form,
    array_response,
    bs_antenna_offsets,
    direction_between,
    exact_array_response,
    pitch_matrix,
    roll_matrix,
    rotation_matrix,
    steering,
    uav_antenna_offsets,
    wrap_add,
    wrap_sub,
    yaw_matrix,
)
from app.services.scenario import REFERENCE_SCENARIOS


def random_attitude(rng: np.random.Generator) -> Attitude:
    return Attitude(
        yaw=rng.uniform(-math.pi, math.pi),
        pitch=rng.uniform(-0.6, 0.6),
        roll=rng.uniform(-0.6, 0.6),
    )


def random_position(rng: np.random.Generator) -> Position3:
    vector = rng.standard_normal(3)
    return Position3.from_array(rng.uniform(100.0, 250.0) * vector / np.linalg.norm(vector))


def test_rotation_matches_scipy_and_composition(rng):
    for _ in range(50):
        att = random_attitude(rng)
        r = rotation_matrix(att)
        reference = Rotation.from_euler("ZYX", [att.yaw, att.pitch, att.roll]).as_matrix()
        assert_allclose(r, reference, atol=1e-12)
        assert_allclose(r, yaw_matrix(att.yaw) @ pitch_matrix(att.pitch) @ roll_matrix(att.roll),
                        atol=1e-12)
        assert_allclose(r.T @ r, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0, abs=1e-12)


def test_direction_for_first_reference_placement():
    direction = direction_between(ORIGIN, REFERENCE_SCENARIOS[1].position)

    assert direction.distance == pytest.approx(150.0)
    assert_allclose(direction.as_array(), [2 / 3, -2 / 3, -1 / 3], atol=1e-12)
    assert_allclose(aoa_bs(direction).as_array(), [2 / 3, -1 / 3], atol=1e-12)
    assert_allclose(aoa_uav(direction, Attitude()).as_array(), [2 / 3, -2 / 3], atol=1e-12)


def test_coincident_positions_are_rejected():
    with pytest.raises(GeometryError):
        direction_between(ORIGIN, Position3(x=0.0, y=0.0, z=0.0))


def test_closed_form_aoa_agrees_with_rotation(rng):
    for _ in range(200):
        direction = direction_between(ORIGIN, random_position(rng))
        att = random_attitude(rng)
        assert_allclose(
            aoa_uav(direction, att).as_array(),
            aoa_uav_closed_form(direction, att).as_array(),
            atol=1e-12,
        )


@pytest.mark.parametrize(
    ("value", "expected"),
    [(0.5, 0.5), (1.0, -1.0), (1.5, -0.5), (-1.0, -1.0), (-1.25, 0.75), (3.2, -0.8)],
)
def test_aoa_pair_wraps_onto_half_open_interval(value, expected):
    assert AoaPair(psi=value, omega=0.0).psi == pytest.approx(expected)


def test_wrapped_arithmetic():
    assert wrap_sub(0.9, -0.9) == pytest.approx(-0.2)
    assert wrap_add(0.9, 0.2) == pytest.approx(-0.9)
    assert wrap_sub(-1.0, -1.0) == 0.0
    values = np.asarray(wrap_add(np.array([0.95, -0.95]), 0.1))
    assert_allclose(values, [-0.95, -0.85])
    assert np.all((values >= -1.0) & (values < 1.0))


def test_attitude_normalizes_angles():
    assert Attitude(yaw=3 * math.pi / 2).yaw == pytest.approx(-math.pi / 2)
    assert Attitude.from_degrees(90, 0, 0).yaw == pytest.approx(math.pi / 2)


def test_centered_steering_is_conjugate_symmetric():
    v = steering(0.37, 16, centered=True)
    assert_allclose(v, v[::-1].conj(), atol=1e-12)
    assert steering(0.37, 16)[0] == 1.0


def test_kronecker_response_matches_elementwise_oracle(rng, bs_geom, uav_geom):
    for _ in range(10):
        p_u = random_position(rng)
        att = random_attitude(rng)
        e = direction_between(ORIGIN, p_u)

        uav_exact = exact_array_response(
            uav_antenna_offsets(uav_geom), rotation_matrix(att), e.as_array(), uav_geom.wavelength,
        )
        bs_exact = exact_array_response(
            bs_antenna_offsets(bs_geom), None, e.as_array(), bs_geom.wavelength,
        )
        assert_allclose(array_response(aoa_uav(e, att), uav_geom), uav_exact, atol=1e-10)
        assert_allclose(array_response(aoa_bs(e), bs_geom), bs_exact, atol=1e-10)


def test_offsets_require_matching_convention(bs_geom, uav_geom):
    with pytest.raises(ValueError, match="uncentered"):
        bs_antenna_offsets(uav_geom)
    with pytest.raises(ValueError, match="centered"):
        uav_antenna_offsets(bs_geom)


def test_uav_offsets_are_centered():
    geom = UpaGeometry.uav(4, 8, 0.01)
    assert_allclose(uav_antenna_offsets(geom).mean(axis=0), 0.0, atol=1e-15)
