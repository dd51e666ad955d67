"""
Pydantic models for out-of-sample validation metrics
"""

from typing import List

from pydantic import Field

from microinit.models.common import ArrayModel, Matrix, Vector


class ModelSpaceStats(ArrayModel):
    """Attractor covariance used by the Mahalanobis model-space error"""
    covariance: Matrix
    regularization: float = Field(..., ge=0)
    rank_deficient: bool = False


class HorizonReport(ArrayModel):
    indices: List[int]
    censored: List[bool]
    k_max: float
    censored_count: int
    cdf: Vector = Field(..., description="Fraction of runs crossed by step k, k = 0..K")


class PowerSpectrum(ArrayModel):
    frequency: Vector = Field(..., description="Cycles per unit time")
    power: Vector = Field(..., description="Mean normalized power, sums to one")
    df: float

    @property
    def density(self):
        return self.power / self.df


class FilterReport(ArrayModel):
    q: int = Field(..., ge=0)
    r0: float
