"""
Pydantic models for observation series and measurement noise
"""

from enum import Enum
from typing import Any, List, Literal

import numpy as np
from pydantic import Field, model_validator

from microinit.exceptions import InvalidSeriesError
from microinit.models.common import ArrayModel, StrictModel, Vector


class OperatorKind(str, Enum):
    """Scalar aggregating observation operators"""
    CUBE_SUM = "cube_sum"
    PRODUCT = "product"
    PAIRWISE_SUM = "pairwise_sum"


class NoiseDistribution(str, Enum):
    GAUSSIAN = "gaussian"
    BETA = "beta"


class ObservationSettings(StrictModel):
    """What is observed and how often"""
    operator: OperatorKind = OperatorKind.CUBE_SUM
    T: int = Field(50, ge=1, description="Observations before the present, series length is T+1")
    m: int = Field(2, ge=1, description="Model steps between consecutive observations")


class NoiseConfig(StrictModel):
    """
    Additive measurement noise

    The Beta shape is standardized to zero mean and unit variance before scaling.
    With left_skewed set the shape is mirrored when needed so the skewness is negative.
    """
    ratio: float = Field(0.3, ge=0, description="sigma_n / sigma_y")
    distribution: NoiseDistribution = NoiseDistribution.GAUSSIAN
    beta_a: float = Field(5.0, gt=0)
    beta_b: float = Field(2.0, gt=0)
    left_skewed: bool = True
    variants: List[Literal["noiseless", "noisy"]] = Field(
        default_factory=lambda: ["noiseless", "noisy"],
        min_length=1,
        description="Series variants built from the same ground truth",
    )


class ObservationSeries(ArrayModel):
    """
    Scalar observations y_{-T}, ..., y_0 sampled every m model steps

    sigma_y is always recomputed from values (population standard deviation).
    """
    values: Vector
    m: int = Field(..., ge=1)
    dt: float = Field(..., gt=0)
    noise_ratio: float = Field(0.0, ge=0)
    sigma_y: float = 0.0

    @model_validator(mode="before")
    @classmethod
    def _derive_sigma(cls, data: Any) -> Any:
        if not isinstance(data, dict) or "values" not in data:
            return data
        values = np.asarray(data["values"], dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise InvalidSeriesError("series needs at least two samples", length=int(values.size))
        if not np.all(np.isfinite(values)):
            raise InvalidSeriesError("series contains non-finite values")
        sigma = float(np.std(values))
        if sigma <= 0.0:
            raise InvalidSeriesError("constant series has zero variance", value=float(values[0]))
        return {**data, "sigma_y": sigma}

    @property
    def T(self) -> int:
        return self.values.size - 1

    @property
    def times(self) -> np.ndarray:
        """t_k for k = -T..0, present time at zero"""
        k = np.arange(-self.T, 1)
        return k * self.m * self.dt

    def with_values(self, values: np.ndarray) -> "ObservationSeries":
        return ObservationSeries(
            values=values, m=self.m, dt=self.dt, noise_ratio=self.noise_ratio
        )
