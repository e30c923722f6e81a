from pydantic import BaseModel, ConfigDict

from app.enums import BeamformingScheme, Method
from app.schemas.geometry import ORIGIN, AoaPair, Attitude, Position3
from app.services.geometry import aoa_bs, aoa_uav, direction_between


class Scenario(BaseModel):
    """One UAV placement: true position and desired attitude."""

    model_config = ConfigDict(frozen=True)

    position: Position3
    desired: Attitude


class NavEstimate(BaseModel):
    """Navigation-system view of the UAV.

    Rough AoA/AoD pairs are derived from the stored position and attitude
    every time they are read.
    """

    model_config = ConfigDict(frozen=True)

    position: Position3
    attitude: Attitude

    @property
    def rough_bs(self) -> AoaPair:
        return aoa_bs(direction_between(ORIGIN, self.position))

    @property
    def rough_uav(self) -> AoaPair:
        return aoa_uav(direction_between(ORIGIN, self.position), self.attitude)


class TrialRecord(BaseModel):
    """Per-trial, per-method result row; field order is the CSV column order."""

    model_config = ConfigDict(frozen=True)

    trial: int
    seed: int
    method: Method
    tx_power_dbm: float
    n_measurements: int
    distance_m: float
    true_psi_bs: float
    true_omega_bs: float
    nav_psi_bs: float
    nav_omega_bs: float
    true_psi_uav: float
    true_omega_uav: float
    est_psi_uav: float
    est_omega_uav: float
    squared_error: float
    received_power_dbm: float
    threshold_dbm: float
    misaligned: bool
    data_rate: float
    spectral_efficiency: float


class PathLossStep(BaseModel):
    """Path loss of every beamforming scheme at one jitter step."""

    model_config = ConfigDict(frozen=True)

    step: int
    yaw: float
    pitch: float
    roll: float
    scheme1_db: float
    scheme2_db: float
    scheme3_db: float

    def loss(self, scheme: BeamformingScheme) -> float:
        return getattr(self, f"{scheme.value}_db")


class SummaryRow(BaseModel):
    """Aggregate of trial records sharing a method, power and training length."""

    model_config = ConfigDict(frozen=True)

    method: Method
    tx_power_dbm: float
    n_measurements: int
    n_trials: int
    mse: float
    mse_stderr: float
    misalignment_rate: float
    mean_data_rate: float
    spectral_efficiency: float


class ExperimentPlan(BaseModel):
    """Which methods, transmit powers and training lengths every trial covers."""

    model_config = ConfigDict(frozen=True)

    methods: tuple[Method, ...]
    tx_powers_dbm: tuple[float, ...]
    n_measurements: tuple[int, ...]


class ExperimentResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    records: list[TrialRecord]
    summary: list[SummaryRow]


class CheckResult(BaseModel):
    """Outcome of one oracle comparison in the self-test."""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    max_error: float
    tolerance: float
