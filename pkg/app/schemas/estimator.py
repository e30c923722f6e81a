from typing import Annotated

from pydantic import AfterValidator, BaseModel, ConfigDict, Field

from app.schemas.geometry import AoaPair
from app.schemas.sensing import SensingRange
from app.validators import validate_non_negative, validate_positive


class EstimatorConfig(BaseModel):
    """Grid search and gradient refinement settings.

    ``None`` grid sizes are derived from the search domain, a ``None`` step size
    from the array size and the measurement energy, and a ``None`` search
    domain means the sensing matrix's declared range.
    """

    model_config = ConfigDict(frozen=True)

    grid_psi: int | None = Field(default=None, ge=2)
    grid_omega: int | None = Field(default=None, ge=2)
    n_peaks: int = Field(default=3, ge=1)
    step_size: Annotated[float, AfterValidator(validate_positive)] | None = None
    stop_threshold: Annotated[float, AfterValidator(validate_positive)] = 1e-10
    max_iterations: int = Field(default=50, ge=0)
    search_domain: SensingRange | None = None


class Candidate(BaseModel):
    """One coarse-grid peak and where gradient refinement took it."""

    model_config = ConfigDict(frozen=True)

    start: AoaPair
    start_value: float
    refined: AoaPair
    refined_value: float
    iterations: int


class AoaEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    aoa: AoaPair
    objective: Annotated[float, AfterValidator(validate_non_negative)]
    iterations: int
    candidates: list[Candidate]


class OperationCounter(BaseModel):
    """Tallies the work done by the estimator.

    ``complex_macs`` counts one multiply-accumulate per sensing-matrix entry
    touched by an objective or gradient evaluation.
    """

    objective_evaluations: int = 0
    gradient_evaluations: int = 0
    complex_macs: int = 0

    def add_objective(self, points: int, matrix_size: int) -> None:
        self.objective_evaluations += points
        self.complex_macs += points * matrix_size

    def add_gradient(self, matrix_size: int) -> None:
        self.gradient_evaluations += 1
        self.complex_macs += 2 * matrix_size
