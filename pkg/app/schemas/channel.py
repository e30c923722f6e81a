from typing import Annotated

import numpy as np
import numpy.typing as npt
from pydantic import AfterValidator, BaseModel, ConfigDict, model_validator

from app.enums import Side
from app.schemas.geometry import AoaPair, UpaGeometry
from app.validators import Params, validate_positive


class LosChannel(BaseModel):
    """Rank-1 line-of-sight channel ``H = coeff * v_uav @ v_bs^H``.

    Only the factors are stored; the dense matrix is never materialized.
    """

    model_config = ConfigDict(frozen=True)

    coeff: complex
    aoa_bs: AoaPair
    aoa_uav: AoaPair
    distance: Annotated[float, AfterValidator(validate_positive)]
    bs_geom: UpaGeometry
    uav_geom: UpaGeometry

    @property
    def wavelength(self) -> float:
        return self.bs_geom.wavelength

    @property
    def free_space_amplitude(self) -> float:
        """Free-space amplitude ``wavelength / (4 pi d)``."""
        return self.wavelength / (4 * np.pi * self.distance)


class Beamformer(BaseModel):
    """Constant-modulus analog beamforming vector with unit norm."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: npt.NDArray[np.complex128]
    side: Side
    pointing: AoaPair

    @model_validator(mode="after")
    def validate_weights(self) -> "Beamformer":
        """Check unit norm and constant element modulus."""
        n = self.weights.size
        if abs(np.linalg.norm(self.weights) - 1.0) > Params.unit_tolerance:
            raise ValueError("Beamformer weights must have unit norm")
        if np.max(np.abs(np.abs(self.weights) - 1 / np.sqrt(n))) > Params.unit_tolerance:
            raise ValueError("Beamformer weights must have constant modulus")
        self.weights.setflags(write=False)
        return self
