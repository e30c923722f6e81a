import numpy as np
import pytest

from app.config import load_settings
from app.enums import Method
from app.schemas.geometry import AoaPair
from app.schemas.harness import ExperimentPlan
from app.services.experiments import (
    run_experiment,
    run_misalignment_experiment,
    run_mse_experiment,
    run_spectral_efficiency,
    run_trial,
    squared_error,
    summarize,
)
from app.trial_pool import TrialPoolManager

PLAN = ExperimentPlan(
    methods=tuple(Method),
    tx_powers_dbm=(0.0, 20.0),
    n_measurements=(4,),
)


@pytest.fixture
def small_settings(isolated_env):
    return load_settings(uav_nx=4, uav_ny=4, n_trials=3, seed=5)


def test_squared_error_wraps_across_boundary():
    error = squared_error(AoaPair(psi=0.99, omega=0.0), AoaPair(psi=-0.99, omega=0.0))
    assert error == pytest.approx(4e-4)
    assert squared_error(AoaPair(psi=0.1, omega=0.2), AoaPair(psi=0.1, omega=0.2)) == 0.0


def test_trial_covers_every_method_power_and_length(small_settings):
    records = run_trial(small_settings, PLAN, 0)
    assert len(records) == 2 + 3 * 2
    assert [r.method for r in records[:2]] == [Method.nav_only, Method.nav_only]
    assert {r.distance_m for r in records} == {records[0].distance_m}


def test_trial_is_deterministic(small_settings):
    assert run_trial(small_settings, PLAN, 1) == run_trial(small_settings, PLAN, 1)
    assert run_trial(small_settings, PLAN, 1) != run_trial(small_settings, PLAN, 2)


def test_nav_only_records_spend_no_training(small_settings):
    for record in run_trial(small_settings, PLAN, 0):
        if record.method is Method.nav_only:
            assert record.n_measurements == 0
            assert record.spectral_efficiency == record.data_rate
        else:
            assert record.spectral_efficiency == pytest.approx(record.data_rate * 0.96)
        assert record.misaligned == (record.received_power_dbm < record.threshold_dbm)


def test_higher_power_raises_rate(small_settings):
    records = [r for r in run_trial(small_settings, PLAN, 0) if r.method is Method.nav_only]
    assert records[1].data_rate > records[0].data_rate
    assert records[1].threshold_dbm == pytest.approx(records[0].threshold_dbm + 20.0)


def test_summary_is_ordered_and_counts_trials(small_settings):
    result = run_experiment(small_settings, PLAN)
    keys = [(row.method, row.tx_power_dbm, row.n_measurements) for row in result.summary]
    methods = list(Method)

    assert len(result.records) == 3 * 8
    assert keys == sorted(keys, key=lambda k: (methods.index(k[0]), k[1], k[2]))
    assert all(row.n_trials == 3 for row in result.summary)
    assert [r.trial for r in result.records] == sorted(r.trial for r in result.records)


def test_summary_statistics(small_settings):
    records = run_trial(small_settings, PLAN, 0) + run_trial(small_settings, PLAN, 1)
    row = summarize(records)[0]
    group = [r for r in records if r.method is Method.nav_only and r.tx_power_dbm == 0.0]

    assert row.method is Method.nav_only
    assert row.mse == pytest.approx(np.mean([r.squared_error for r in group]))
    assert row.mse_stderr == pytest.approx(
        np.std([r.squared_error for r in group], ddof=1) / np.sqrt(2),
    )
    assert summarize(records[:1])[0].mse_stderr == 0.0


def test_sweeps_use_requested_lengths(small_settings):
    mse = run_mse_experiment(small_settings, [Method.partial_type2], [10.0], 6)
    assert {r.n_measurements for r in mse.records} == {6}

    misalignment = run_misalignment_experiment(small_settings, [Method.nav_only], [10.0], 6)
    assert {r.n_measurements for r in misalignment.records} == {0}

    se = run_spectral_efficiency(small_settings, [Method.fully_random], [10.0], [4, 8])
    assert [row.n_measurements for row in se.summary] == [4, 8]


@pytest.mark.slow
def test_pool_matches_serial_run(isolated_env):
    serial_settings = load_settings(uav_nx=4, uav_ny=4, n_trials=6, seed=2)
    parallel_settings = load_settings(uav_nx=4, uav_ny=4, n_trials=6, seed=2, workers=2)
    pool = TrialPoolManager(parallel_settings)
    pool.startup()
    try:
        parallel = run_experiment(parallel_settings, PLAN, pool)
    finally:
        pool.shutdown()
    assert parallel == run_experiment(serial_settings, PLAN)


@pytest.mark.slow
def test_nav_only_misalignment_rate(isolated_env):
    settings = load_settings(n_trials=300, seed=11)
    result = run_misalignment_experiment(settings, [Method.nav_only], [16.0], 6)
    assert 0.01 <= result.summary[0].misalignment_rate <= 0.25


@pytest.mark.slow
def test_partial_training_is_accurate_at_high_power(isolated_env):
    settings = load_settings(n_trials=20, seed=13)
    result = run_mse_experiment(settings, [Method.partial_type2], [30.0], 8)
    assert np.median([r.squared_error for r in result.records]) < 1e-3


def median_errors(records) -> dict[tuple[Method, float], float]:
    groups: dict[tuple[Method, float], list[float]] = {}
    for r in records:
        groups.setdefault((r.method, r.tx_power_dbm), []).append(r.squared_error)
    return {key: float(np.median(errors)) for key, errors in groups.items()}


@pytest.mark.slow
def test_narrower_ranges_estimate_better_at_high_power(isolated_env):
    settings = load_settings(n_trials=40, seed=17)
    result = run_mse_experiment(settings, list(Method), [30.0], 6)
    median = {method: error for (method, _), error in median_errors(result.records).items()}

    assert median[Method.partial_type2] < median[Method.partial_type1]
    assert median[Method.partial_type1] < median[Method.fully_random]
    assert median[Method.fully_random] < median[Method.nav_only]


@pytest.mark.slow
def test_training_overtakes_navigation_as_power_grows(isolated_env):
    settings = load_settings(n_trials=60, seed=19)
    methods = [Method.nav_only, Method.fully_random]
    result = run_misalignment_experiment(settings, methods, [-10.0, 22.0], 6)
    median = median_errors(result.records)
    rate = {(row.method, row.tx_power_dbm): row.misalignment_rate for row in result.summary}

    assert median[Method.fully_random, -10.0] > median[Method.nav_only, -10.0]
    assert rate[Method.fully_random, -10.0] > rate[Method.nav_only, -10.0]
    assert median[Method.fully_random, 22.0] < median[Method.nav_only, 22.0]
    assert rate[Method.fully_random, 22.0] <= rate[Method.nav_only, 22.0]


@pytest.mark.slow
def test_spectral_efficiency_peaks_at_intermediate_length(isolated_env):
    settings = load_settings(n_trials=60, seed=23)
    n_values = list(range(2, 17, 2))
    result = run_spectral_efficiency(settings, [Method.partial_type2], [-10.0], n_values)
    efficiency = [row.spectral_efficiency for row in result.summary]

    assert [row.n_measurements for row in result.summary] == n_values
    assert n_values[int(np.argmax(efficiency))] not in (n_values[0], n_values[-1])
