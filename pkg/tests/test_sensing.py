import numpy as np
import pytest
from numpy.testing import assert_allclose
from pydantic import ValidationError
from scipy import stats

from app.enums import Method
from app.exceptions import PartitionError
from app.schemas.geometry import AoaPair
from app.schemas.sensing import METHOD_PRESETS, SensingRange, SensingSpec
from app.services.sensing import (
    beamspace_map,
    captured_energy,
    cosine_grid,
    random_subarray_ula,
    range_energy_fraction,
    sensing_matrix,
    subarray_ula,
)
from app.utils import trial_rng

CENTER = AoaPair(psi=0.0, omega=0.0)


@pytest.mark.parametrize(
    ("method", "half_width"),
    [(Method.fully_random, 1.0), (Method.partial_type1, 0.4), (Method.partial_type2, 0.225)],
)
def test_declared_ranges_of_presets(method, half_width, uav_geom):
    declared = METHOD_PRESETS[method].spec(6, CENTER, uav_geom).declared_range()
    assert declared.half_widths == pytest.approx((half_width, half_width))


def test_full_range_bounds():
    assert SensingRange.full().bounds() == ((-1.0, 1.0), (-1.0, 1.0))


def test_subarray_ula_is_unit_norm_constant_modulus(rng):
    v = random_subarray_ula(rng, 16, 4, -0.2, 0.2)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert_allclose(np.abs(v), 1 / 4)


def test_subarray_blocks_are_steered_at_their_centers():
    v = subarray_ula([0.5, -0.25], [0.1, -0.3], 8)
    k = np.arange(4)
    assert_allclose(v[:4], np.exp(1j * np.pi * (0.5 + 0.1 * k)) / np.sqrt(8))
    assert_allclose(v[4:], np.exp(1j * np.pi * (-0.25 - 0.3 * k)) / np.sqrt(8))


def test_partition_must_divide_axis(rng, uav_geom):
    with pytest.raises(PartitionError):
        random_subarray_ula(rng, 16, 3, -0.1, 0.1)
    with pytest.raises(ValidationError):
        SensingSpec(
            n_measurements=4,
            n_subarrays_x=5,
            n_subarrays_y=2,
            half_width=0.1,
            center=CENTER,
            uav_geom=uav_geom,
        )


def test_empty_center_range_is_rejected(rng):
    with pytest.raises(ValueError, match="empty"):
        random_subarray_ula(rng, 16, 2, 0.3, 0.1)


def test_columns_are_kronecker_products_of_logged_draws(rng, uav_geom):
    spec = METHOD_PRESETS[Method.partial_type1].spec(6, AoaPair(psi=0.3, omega=-0.5), uav_geom)
    matrix = sensing_matrix(spec, rng)
    draws = matrix.draws

    assert matrix.columns.shape == (256, 6)
    for i in range(6):
        expected = np.kron(
            subarray_ula(draws.phases_x[i], draws.centers_x[i], 16),
            subarray_ula(draws.phases_y[i], draws.centers_y[i], 16),
        )
        assert_allclose(matrix.columns[:, i], expected, atol=1e-12)
    assert np.all(np.abs(draws.centers_x - 0.3) <= 0.15 + 1e-12)
    assert np.all(np.abs(draws.centers_y + 0.5) <= 0.15 + 1e-12)


def test_sensing_matrix_is_deterministic_per_stream(uav_geom):
    spec = METHOD_PRESETS[Method.partial_type2].spec(6, CENTER, uav_geom)
    first = sensing_matrix(spec, trial_rng(5, 1, 2))
    again = sensing_matrix(spec, trial_rng(5, 1, 2))
    other = sensing_matrix(spec, trial_rng(5, 2, 2))

    assert np.array_equal(first.columns, again.columns)
    assert not np.array_equal(first.columns, other.columns)


def test_grid_energy_obeys_parseval(rng, uav_geom):
    spec = METHOD_PRESETS[Method.partial_type2].spec(5, CENTER, uav_geom)
    matrix = sensing_matrix(spec, rng)
    energy = captured_energy(matrix, cosine_grid(16), cosine_grid(32))
    assert energy.sum() == pytest.approx(16 * 32 * 5)


@pytest.mark.parametrize("method", [Method.partial_type1, Method.partial_type2])
def test_energy_concentrates_in_declared_range(method, uav_geom):
    center = AoaPair(psi=0.4, omega=-0.2)
    spec = METHOD_PRESETS[method].spec(6, center, uav_geom)
    fractions = [
        range_energy_fraction(matrix, matrix.declared_range)
        for matrix in (sensing_matrix(spec, trial_rng(11, seed)) for seed in range(20))
    ]
    assert np.mean(fractions) >= 0.72


def test_fully_random_range_captures_everything(rng, uav_geom):
    matrix = sensing_matrix(METHOD_PRESETS[Method.fully_random].spec(4, CENTER, uav_geom), rng)
    assert matrix.spec.is_fully_random
    assert range_energy_fraction(matrix, matrix.declared_range) == pytest.approx(1.0)


def test_beamspace_map_is_normalized(rng, uav_geom):
    matrix = sensing_matrix(METHOD_PRESETS[Method.partial_type2].spec(6, CENTER, uav_geom), rng)
    energy, psi, omega = beamspace_map(matrix, 32, 16)

    assert energy.shape == (32, 16)
    assert energy.max() == 1.0
    assert psi[0] == -1.0
    assert omega[-1] < 1.0
    with pytest.raises(ValueError, match="at least 2"):
        beamspace_map(matrix, 1)


def test_range_containment_wraps():
    sensing_range = SensingRange(
        center=AoaPair(psi=0.95, omega=0.0), half_width_psi=0.1, half_width_omega=0.5,
    )
    assert sensing_range.contains(-0.98, 0.2)
    assert not sensing_range.contains(0.8, 0.2)
    assert not sensing_range.contains(0.95, 0.6)
    assert sensing_range.bounds()[0] == pytest.approx((0.85, 1.05))


@pytest.mark.parametrize(
    ("center", "half_widths"),
    [((0.5, 0.0), (0.5, 1.0)), ((-0.5, 0.0), (0.5, 1.0)), ((0.0, 0.5), (1.0, 0.5))],
)
def test_fully_random_energy_is_spread_evenly(center, half_widths, uav_geom):
    half_space = SensingRange(
        center=AoaPair(psi=center[0], omega=center[1]),
        half_width_psi=half_widths[0],
        half_width_omega=half_widths[1],
    )
    spec = METHOD_PRESETS[Method.fully_random].spec(6, CENTER, uav_geom)
    fractions = [
        range_energy_fraction(sensing_matrix(spec, trial_rng(13, seed)), half_space)
        for seed in range(20)
    ]
    assert 0.35 <= np.mean(fractions) <= 0.65


@pytest.mark.parametrize("method", [Method.partial_type1, Method.partial_type2])
def test_moving_the_center_shifts_every_draw(method, uav_geom):
    shift = np.array([0.3, -0.2])
    preset = METHOD_PRESETS[method]
    base = sensing_matrix(preset.spec(6, CENTER, uav_geom), trial_rng(21, 0))
    moved = sensing_matrix(
        preset.spec(6, AoaPair.from_array(shift), uav_geom), trial_rng(21, 0),
    )

    assert np.array_equal(base.draws.phases_x, moved.draws.phases_x)
    assert np.array_equal(base.draws.phases_y, moved.draws.phases_y)
    assert_allclose(moved.draws.centers_x - base.draws.centers_x, shift[0], atol=1e-12)
    assert_allclose(moved.draws.centers_y - base.draws.centers_y, shift[1], atol=1e-12)


def test_subarray_phases_are_uniform(uav_geom):
    spec = METHOD_PRESETS[Method.partial_type1].spec(8, CENTER, uav_geom)
    phases = np.concatenate(
        [
            np.ravel([m.draws.phases_x, m.draws.phases_y])
            for m in (sensing_matrix(spec, trial_rng(31, seed)) for seed in range(100))
        ],
    )
    counts, _ = np.histogram(phases, bins=16, range=(-1.0, 1.0))

    assert np.all((phases >= -1.0) & (phases < 1.0))
    assert stats.chisquare(counts).pvalue > 1e-3
