from typing import Annotated

import numpy as np
import numpy.typing as npt
from pydantic import AfterValidator, BaseModel, ConfigDict, model_validator
from scipy.stats import norm

from app.schemas.geometry import AoaPair
from app.validators import validate_non_negative

Sigma = Annotated[float, AfterValidator(validate_non_negative)]


class JitterModel(BaseModel):
    """Standard deviations of independent zero-mean Gaussian attitude jitter."""

    model_config = ConfigDict(frozen=True)

    sigma_alpha: Sigma = 0.0
    sigma_beta: Sigma = 0.0
    sigma_gamma: Sigma = 0.0

    def variances(self) -> npt.NDArray[np.float64]:
        return np.array([self.sigma_alpha, self.sigma_beta, self.sigma_gamma]) ** 2

    @classmethod
    def isotropic(cls, sigma: float) -> "JitterModel":
        return cls(sigma_alpha=sigma, sigma_beta=sigma, sigma_gamma=sigma)


class AoaDistribution(BaseModel):
    """Gaussian approximation of the UAV-side cosine AoA under jitter.

    ``mean`` is the AoA at the desired attitude and ``covariance`` is
    ``J diag(sigma^2) J^T``.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mean: npt.NDArray[np.float64]
    covariance: npt.NDArray[np.float64]

    @model_validator(mode="after")
    def validate_covariance(self) -> "AoaDistribution":
        """Check shapes, symmetry and positive semidefiniteness."""
        if self.mean.shape != (2,) or self.covariance.shape != (2, 2):
            raise ValueError("AoA distribution needs a 2-vector mean and a 2x2 covariance")
        if np.max(np.abs(self.covariance - self.covariance.T)) > 1e-14:
            raise ValueError("Covariance must be symmetric")
        if np.min(np.linalg.eigvalsh(self.covariance)) < -1e-14:
            raise ValueError("Covariance must be positive semidefinite")
        self.mean.setflags(write=False)
        self.covariance.setflags(write=False)
        return self

    @property
    def std(self) -> npt.NDArray[np.float64]:
        """Marginal standard deviations of (psi, omega)."""
        return np.sqrt(np.clip(np.diag(self.covariance), 0.0, None))

    @property
    def mean_pair(self) -> AoaPair:
        return AoaPair.from_array(self.mean)

    def intervals(self, k: float = 3.0) -> npt.NDArray[np.float64]:
        """Marginal ``mean -/+ k*std`` intervals, one row per axis."""
        half = k * self.std
        return np.column_stack([self.mean - half, self.mean + half])

    @staticmethod
    def coverage(k: float = 3.0) -> float:
        """Probability mass of a Gaussian within ``k`` standard deviations."""
        return float(norm.cdf(k) - norm.cdf(-k))
