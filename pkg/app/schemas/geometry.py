import math
from typing import Annotated

import numpy as np
import numpy.typing as npt
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator

from app.validators import (
    Params,
    validate_angle,
    validate_cosine_angle,
    validate_finite,
    validate_positive,
)

Angle = Annotated[float, AfterValidator(validate_angle)]
CosineAngle = Annotated[float, AfterValidator(validate_cosine_angle)]
Finite = Annotated[float, AfterValidator(validate_finite)]


class Attitude(BaseModel):
    """UAV orientation as yaw, pitch and roll in radians."""

    model_config = ConfigDict(frozen=True)

    yaw: Angle = 0.0
    pitch: Angle = 0.0
    roll: Angle = 0.0

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.yaw, self.pitch, self.roll])

    @classmethod
    def from_array(cls, values: npt.ArrayLike) -> "Attitude":
        yaw, pitch, roll = np.asarray(values, dtype=float)
        return cls(yaw=yaw, pitch=pitch, roll=roll)

    @classmethod
    def from_degrees(cls, yaw: float, pitch: float, roll: float) -> "Attitude":
        return cls(
            yaw=math.radians(yaw),
            pitch=math.radians(pitch),
            roll=math.radians(roll),
        )


class Position3(BaseModel):
    """Cartesian position in meters, BS at the origin."""

    model_config = ConfigDict(frozen=True)

    x: Finite
    y: Finite
    z: Finite

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.x, self.y, self.z])

    @classmethod
    def from_array(cls, values: npt.ArrayLike) -> "Position3":
        x, y, z = np.asarray(values, dtype=float)
        return cls(x=x, y=y, z=z)

    @property
    def norm(self) -> float:
        return math.hypot(self.x, self.y, self.z)


ORIGIN = Position3(x=0.0, y=0.0, z=0.0)


class Direction(BaseModel):
    """Unit direction from the UAV towards the BS with its spherical angles."""

    model_config = ConfigDict(frozen=True)

    e: tuple[float, float, float]
    elevation: float
    azimuth: float
    distance: Annotated[float, AfterValidator(validate_positive)]

    @model_validator(mode="after")
    def validate_unit_vector(self) -> "Direction":
        """Check that ``e`` is a unit vector consistent with its angles."""
        e = np.asarray(self.e)
        if abs(np.linalg.norm(e) - 1.0) > Params.unit_tolerance:
            raise ValueError(f"Direction vector must have unit norm, got {e}")
        spherical = np.array(
            [
                math.cos(self.elevation) * math.cos(self.azimuth),
                math.cos(self.elevation) * math.sin(self.azimuth),
                math.sin(self.elevation),
            ],
        )
        if np.max(np.abs(spherical - e)) > Params.unit_tolerance:
            raise ValueError("Direction vector disagrees with elevation/azimuth")
        return self

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.e)


class AoaPair(BaseModel):
    """Two-dimensional cosine AoA/AoD, each component in [-1, 1)."""

    model_config = ConfigDict(frozen=True)

    psi: CosineAngle
    omega: CosineAngle

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array([self.psi, self.omega])

    @classmethod
    def from_array(cls, values: npt.ArrayLike) -> "AoaPair":
        psi, omega = np.asarray(values, dtype=float)
        return cls(psi=psi, omega=omega)


class UpaGeometry(BaseModel):
    """Uniform planar array with half-wavelength spacing.

    The BS array spans the x-z plane with its first element at the origin;
    the UAV array spans the body x-y plane and is centered on the airframe.
    """

    model_config = ConfigDict(frozen=True)

    n_x: int = Field(ge=1)
    n_second_axis: int = Field(ge=1)
    wavelength: Annotated[float, AfterValidator(validate_positive)]
    centered: bool = False

    @property
    def n_elements(self) -> int:
        return self.n_x * self.n_second_axis

    @classmethod
    def bs(cls, n_x: int, n_z: int, wavelength: float) -> "UpaGeometry":
        return cls(n_x=n_x, n_second_axis=n_z, wavelength=wavelength, centered=False)

    @classmethod
    def uav(cls, n_x: int, n_y: int, wavelength: float) -> "UpaGeometry":
        return cls(n_x=n_x, n_second_axis=n_y, wavelength=wavelength, centered=True)
