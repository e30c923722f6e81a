import pytest

from app.config import load_settings
from app.enums import EnvironmentTypes, Method
from app.exceptions import ConfigError


def test_defaults(settings):
    assert settings.environment == EnvironmentTypes.production
    assert settings.wavelength_m == pytest.approx(3e8 / 28e9)
    assert settings.noise_power_w == pytest.approx(10 ** (-11.4))
    assert settings.bs_geometry.n_elements == 256
    assert settings.uav_geometry.centered
    assert settings.jitter_model.sigma_beta == 0.05
    assert settings.methods == list(Method)
    assert settings.tx_powers_dbm[0] == -10
    assert settings.estimator_config.n_peaks == 3


def test_toml_file_is_read(isolated_env):
    path = isolated_env / "study.toml"
    path.write_text(
        'n_trials = 5\nmethods = ["nav-only", "partial-type2"]\nsigma_alpha_rad = 0.1\n',
    )
    settings = load_settings(path)

    assert settings.n_trials == 5
    assert settings.methods == [Method.nav_only, Method.partial_type2]
    assert settings.jitter_model.sigma_alpha == 0.1


def test_default_file_in_working_directory(isolated_env):
    (isolated_env / "uavbt.toml").write_text("seed = 42\n")
    assert load_settings().seed == 42


def test_precedence_overrides_env_file(isolated_env, monkeypatch):
    path = isolated_env / "study.toml"
    path.write_text("seed = 4\nn_trials = 9\nworkers = 2\n")
    monkeypatch.setenv("UAVBT_SEED", "3")
    monkeypatch.setenv("UAVBT_N_TRIALS", "8")

    settings = load_settings(path, n_trials=7)
    assert settings.n_trials == 7
    assert settings.seed == 3
    assert settings.workers == 2


def test_unknown_key_is_named(isolated_env):
    path = isolated_env / "study.toml"
    path.write_text("n_trails = 5\n")
    with pytest.raises(ConfigError, match="n_trails"):
        load_settings(path)


def test_missing_file(isolated_env):
    with pytest.raises(ConfigError, match="not found"):
        load_settings(isolated_env / "absent.toml")


def test_malformed_file(isolated_env):
    path = isolated_env / "study.toml"
    path.write_text("n_trials = = 5\n")
    with pytest.raises(ConfigError, match="Malformed"):
        load_settings(path)


def test_training_longer_than_coherence_block(isolated_env):
    with pytest.raises(ConfigError, match="coherence"):
        load_settings(coherence_intervals=10, n_measurements_sweep=[4, 12])


def test_partition_must_fit_uav_array(isolated_env):
    with pytest.raises(ConfigError, match="sub-arrays"):
        load_settings(uav_nx=6)
    assert load_settings(uav_nx=6, methods=["nav-only", "fully-random"]).uav_nx == 6


def test_invalid_value_is_rejected(isolated_env):
    with pytest.raises(ConfigError, match="sigma_gamma_rad"):
        load_settings(sigma_gamma_rad=-1)
