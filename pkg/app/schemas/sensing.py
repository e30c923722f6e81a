from typing import Annotated, Self

import numpy as np
import numpy.typing as npt
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, model_validator

from app.enums import Method
from app.schemas.geometry import AoaPair, UpaGeometry
from app.utils import FloatLike, wrap_cosine
from app.validators import Params, validate_non_negative, validate_partition

HalfWidth = Annotated[float, AfterValidator(validate_non_negative)]


class SensingRange(BaseModel):
    """Per-axis cosine-angle interval ``center -/+ half_width``, wrapped on [-1, 1).

    A half-width of 1 or more covers the whole axis.
    """

    model_config = ConfigDict(frozen=True)

    center: AoaPair
    half_width_psi: HalfWidth
    half_width_omega: HalfWidth

    @property
    def half_widths(self) -> tuple[float, float]:
        return self.half_width_psi, self.half_width_omega

    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Interval endpoints per axis; a full axis is reported as (-1, 1)."""
        result = []
        for center, half in zip(self.center.as_array(), self.half_widths, strict=True):
            if half >= 1.0:
                result.append((-1.0, 1.0))
            else:
                result.append((float(center - half), float(center + half)))
        return result[0], result[1]

    def width(self, axis: int) -> float:
        return min(2 * self.half_widths[axis], 2.0)

    def contains_axis(self, axis: int, values: FloatLike) -> npt.NDArray[np.bool_]:
        """Whether the wrapped distance from the center is below the half-width."""
        half = self.half_widths[axis]
        values = np.asarray(values, dtype=float)
        if half >= 1.0:
            return np.ones(values.shape, dtype=bool)
        distance = wrap_cosine(values - self.center.as_array()[axis])
        return np.abs(distance) < half

    def contains(self, psi: FloatLike, omega: FloatLike) -> npt.NDArray[np.bool_]:
        return self.contains_axis(0, psi) & self.contains_axis(1, omega)

    @classmethod
    def full(cls) -> "SensingRange":
        return cls(center=AoaPair(psi=0.0, omega=0.0), half_width_psi=1.0, half_width_omega=1.0)


class SensingSpec(BaseModel):
    """Parameters of a direction-constrained random sensing matrix.

    ``n_subarrays_*`` equal to the axis length gives the fully random
    (omnidirectional) construction with single-element sub-arrays.
    """

    model_config = ConfigDict(frozen=True)

    n_measurements: int = Field(ge=1)
    n_subarrays_x: int = Field(ge=1)
    n_subarrays_y: int = Field(ge=1)
    half_width: HalfWidth
    center: AoaPair
    uav_geom: UpaGeometry

    @model_validator(mode="after")
    def validate_partitions(self) -> Self:
        """Reject sub-array counts that do not divide the array axes."""
        validate_partition(self.uav_geom.n_x, self.n_subarrays_x)
        validate_partition(self.uav_geom.n_second_axis, self.n_subarrays_y)
        return self

    @property
    def subarray_lengths(self) -> tuple[int, int]:
        return (
            self.uav_geom.n_x // self.n_subarrays_x,
            self.uav_geom.n_second_axis // self.n_subarrays_y,
        )

    @property
    def is_fully_random(self) -> bool:
        return self.subarray_lengths == (1, 1)

    def declared_range(self) -> SensingRange:
        """Center range widened by the sub-array transition band ``N_a / N_axis``."""
        return SensingRange(
            center=self.center,
            half_width_psi=self.half_width + self.n_subarrays_x / self.uav_geom.n_x,
            half_width_omega=self.half_width + self.n_subarrays_y / self.uav_geom.n_second_axis,
        )


class SubarrayDraws(BaseModel):
    """Random collective phases and center angles behind a sensing matrix.

    Arrays have shape (N, N_a) for each axis, one row per measurement.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    phases_x: npt.NDArray[np.float64]
    centers_x: npt.NDArray[np.float64]
    phases_y: npt.NDArray[np.float64]
    centers_y: npt.NDArray[np.float64]


class SensingMatrix(BaseModel):
    """Sensing matrix ``M`` of shape (N_U, N); each column is one receive beam."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    columns: npt.NDArray[np.complex128]
    declared_range: SensingRange
    spec: SensingSpec
    draws: SubarrayDraws | None = None

    @model_validator(mode="after")
    def validate_columns(self) -> Self:
        """Check shape, unit column norms and constant element modulus."""
        n_u = self.spec.uav_geom.n_elements
        if self.columns.shape != (n_u, self.spec.n_measurements):
            raise ValueError(
                f"Sensing matrix must be {n_u}x{self.spec.n_measurements}, "
                f"got {self.columns.shape}",
            )
        norms = np.linalg.norm(self.columns, axis=0)
        if np.max(np.abs(norms - 1.0)) > Params.unit_tolerance:
            raise ValueError("Sensing matrix columns must have unit norm")
        modulus = np.abs(self.columns)
        if np.max(np.abs(modulus - 1 / np.sqrt(n_u))) > Params.unit_tolerance:
            raise ValueError("Sensing matrix elements must have constant modulus")
        self.columns.setflags(write=False)
        return self

    @property
    def n_measurements(self) -> int:
        return self.columns.shape[1]


class MethodPreset(BaseModel):
    """Sub-array count and center half-width of one training method.

    ``n_subarrays=None`` means one sub-array per element (fully random).
    """

    model_config = ConfigDict(frozen=True)

    n_subarrays: int | None
    half_width: HalfWidth

    def spec(
        self,
        n_measurements: int,
        center: AoaPair,
        uav_geom: UpaGeometry,
    ) -> SensingSpec:
        return SensingSpec(
            n_measurements=n_measurements,
            n_subarrays_x=self.n_subarrays or uav_geom.n_x,
            n_subarrays_y=self.n_subarrays or uav_geom.n_second_axis,
            half_width=self.half_width,
            center=center,
            uav_geom=uav_geom,
        )


METHOD_PRESETS: dict[Method, MethodPreset] = {
    Method.fully_random: MethodPreset(n_subarrays=None, half_width=0.0),
    Method.partial_type1: MethodPreset(n_subarrays=4, half_width=0.15),
    Method.partial_type2: MethodPreset(n_subarrays=2, half_width=0.1),
}


class CodebookEntry(BaseModel):
    """A stored sensing matrix and the generator stream ``(seed, stream)`` it was drawn from."""

    model_config = ConfigDict(frozen=True)

    matrix: SensingMatrix
    seed: int = Field(ge=0)
    stream: int = Field(default=0, ge=0)
