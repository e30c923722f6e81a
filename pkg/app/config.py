import logging
import tomllib
from contextvars import ContextVar
from pathlib import Path
from typing import Any, Self

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
    TomlConfigSettingsSource,
)

from app.enums import EnvironmentTypes, Method
from app.exceptions import ConfigError
from app.schemas.estimator import EstimatorConfig
from app.schemas.geometry import UpaGeometry
from app.schemas.jitter import JitterModel
from app.schemas.sensing import METHOD_PRESETS
from app.utils import dbm_to_watts
from app.validators import validate_partition

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_FILE = Path("uavbt.toml")

_config_file: ContextVar[Path] = ContextVar("config_file", default=DEFAULT_CONFIG_FILE)


class SimulationSettings(BaseSettings):
    # Environment and debugging
    environment: EnvironmentTypes = EnvironmentTypes.production
    debug: bool = False

    # Link
    carrier_frequency_hz: float = Field(default=28e9, gt=0)
    speed_of_light_m_s: float = Field(default=3e8, gt=0)
    noise_power_dbm: float = -84.0
    tx_power_dbm: float = 16.0
    tx_powers_dbm: list[float] = Field(default_factory=lambda: list(range(-10, 31, 4)))

    # Arrays
    bs_nx: int = Field(default=16, ge=1)
    bs_nz: int = Field(default=16, ge=1)
    uav_nx: int = Field(default=16, ge=1)
    uav_ny: int = Field(default=16, ge=1)

    # Jitter and navigation errors
    sigma_alpha_rad: float = Field(default=0.05, ge=0)
    sigma_beta_rad: float = Field(default=0.05, ge=0)
    sigma_gamma_rad: float = Field(default=0.05, ge=0)
    nav_position_std_m: float = Field(default=1.0, ge=0)

    # Scenario sampling
    hemisphere_radius_m: float = Field(default=200.0, gt=0)
    max_abs_sin_elevation: float = Field(default=0.95, gt=0, le=1)
    random_desired_yaw: bool = True
    desired_yaw_rad: float = 0.0
    desired_pitch_rad: float = 0.0
    desired_roll_rad: float = 0.0

    # Beam training
    methods: list[Method] = Field(default_factory=lambda: list(Method))
    n_measurements: int = Field(default=6, ge=1)
    n_measurements_sweep: list[int] = Field(default_factory=lambda: list(range(4, 17, 2)))
    coherence_intervals: int = Field(default=100, ge=1)

    # Estimator
    n_peaks: int = Field(default=3, ge=1)
    step_size: float | None = Field(default=None, gt=0)
    stop_threshold: float = Field(default=1e-10, gt=0)
    max_iterations: int = Field(default=50, ge=0)

    # Monte Carlo
    n_trials: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(env_prefix="UAVBT_", extra="forbid")

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (
            init_settings,
            env_settings,
            TomlConfigSettingsSource(settings_cls, toml_file=_config_file.get()),
        )

    @model_validator(mode="after")
    def validate_training(self) -> Self:
        """Reject combinations no trial could run with."""
        lengths = [self.n_measurements, *self.n_measurements_sweep]
        if max(lengths) > self.coherence_intervals:
            raise ValueError(
                f"Training length {max(lengths)} exceeds the coherence block "
                f"of {self.coherence_intervals} intervals",
            )
        for method in self.methods:
            preset = METHOD_PRESETS.get(method)
            if preset is not None and preset.n_subarrays is not None:
                validate_partition(self.uav_nx, preset.n_subarrays)
                validate_partition(self.uav_ny, preset.n_subarrays)
        return self

    @property
    def wavelength_m(self) -> float:
        return self.speed_of_light_m_s / self.carrier_frequency_hz

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    @property
    def bs_geometry(self) -> UpaGeometry:
        return UpaGeometry.bs(self.bs_nx, self.bs_nz, self.wavelength_m)

    @property
    def uav_geometry(self) -> UpaGeometry:
        return UpaGeometry.uav(self.uav_nx, self.uav_ny, self.wavelength_m)

    @property
    def jitter_model(self) -> JitterModel:
        return JitterModel(
            sigma_alpha=self.sigma_alpha_rad,
            sigma_beta=self.sigma_beta_rad,
            sigma_gamma=self.sigma_gamma_rad,
        )

    @property
    def estimator_config(self) -> EstimatorConfig:
        return EstimatorConfig(
            n_peaks=self.n_peaks,
            step_size=self.step_size,
            stop_threshold=self.stop_threshold,
            max_iterations=self.max_iterations,
        )


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'config'}: {item['msg']}"
        for item in error.errors()
    )


def load_settings(config_path: Path | None = None, **overrides: Any) -> SimulationSettings:
    """Build settings from overrides, ``UAVBT_*`` variables and a TOML file.

    Args:
        config_path: TOML file to read instead of ``uavbt.toml`` in the working directory
        **overrides: Values that take precedence over every other source

    Returns:
        SimulationSettings: The validated settings

    Raises:
        ConfigError: If the file is missing or malformed, or a value is invalid

    """
    if config_path is not None and not config_path.is_file():
        raise ConfigError(f"Config file not found: {config_path}")

    token = _config_file.set(config_path or DEFAULT_CONFIG_FILE)
    try:
        settings = SimulationSettings(**overrides)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {_describe(e)}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"Malformed config file: {e}") from e
    finally:
        _config_file.reset(token)

    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings
