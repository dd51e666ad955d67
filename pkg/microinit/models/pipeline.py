"""
Pydantic models for the preprocess / bound / refine initialization procedure
"""

from typing import List, Optional

from pydantic import Field, model_validator

from microinit.models.common import ArrayModel, StrictModel, Vector
from microinit.models.optim import OptimizerSpec, OptRun


class Box(StrictModel):
    """Axis-aligned box used to draw guess directions for one basin"""
    low: List[float]
    high: List[float]

    @model_validator(mode="after")
    def _check_bounds(self):
        if len(self.low) != len(self.high):
            raise ValueError("box low/high lengths differ")
        if any(lo > hi for lo, hi in zip(self.low, self.high)):
            raise ValueError("box low must not exceed high")
        return self


class PipelineConfig(StrictModel):
    """
    Thresholds, budgets and optimizer for one initialization

    beta_r is the coefficient in front of r0^-2, so the refinement threshold is
    alpha_r + ratio^2 * beta_r / r0^2.
    """
    alpha_R: float = Field(0.05, gt=0, le=1)
    beta_R: float = Field(0.5, gt=0, le=1)
    alpha_r: float = Field(1e-4, gt=0, le=1)
    beta_r: float = Field(0.8, gt=0, le=1)
    q: int = Field(4, ge=0, description="LPMA passes")
    r0: float = Field(2.02, ge=1, description="Assumed SNR gain of the filter")
    noise_ratio: Optional[float] = Field(
        None, ge=0, description="Known sigma_n/sigma_y; falls back to the series metadata"
    )
    optimizer: OptimizerSpec = Field(default_factory=OptimizerSpec)
    bound_budget: int = Field(200_000, ge=0, description="Max model steps in the bound stage")
    bound_threshold: Optional[float] = Field(
        None, gt=0, description="Explicit bound-stage threshold overriding alpha_R/beta_R"
    )
    refine_budget: int = Field(5000, ge=1, description="Max optimizer iterations")
    patience: int = Field(200, ge=1)
    guess_retries: int = Field(10, ge=1)
    basins: List[Box] = Field(default_factory=list)
    seed: int = Field(0, ge=0)

    @model_validator(mode="after")
    def _check_threshold_order(self):
        if self.alpha_r >= self.alpha_R:
            raise ValueError("alpha_r must be smaller than alpha_R")
        if self.beta_r / self.r0**2 > self.beta_R:
            raise ValueError("beta_r / r0^2 must not exceed beta_R")
        return self

    def delta_R(self, noise_ratio: float) -> float:
        if self.bound_threshold is not None:
            return self.bound_threshold
        return self.alpha_R + noise_ratio**2 * self.beta_R

    def delta_r(self, noise_ratio: float, r0: Optional[float] = None) -> float:
        gain = self.r0 if r0 is None else r0
        return self.alpha_r + noise_ratio**2 * self.beta_r / gain**2


class StageFlags(StrictModel):
    bounded: bool = False
    refined: bool = False
    failed_stage: Optional[str] = None
    message: Optional[str] = None


class InitializationResult(ArrayModel):
    """Assimilated state at t_{-T} and its forward propagation to t_0"""
    assimilated: Vector
    initialized: Vector
    rough: Vector = Field(..., description="Bound-stage state before refinement")
    cost_assimilated: Optional[float] = None
    cost_rough: Optional[float] = None
    bound_steps_used: int = 0
    refine_trace: Optional[OptRun] = None
    r0_used: float
    noise_ratio_used: float
    q_used: int = Field(0, ge=0, description="Filter passes actually applied")
    delta_R: float
    delta_r: float
    flags: StageFlags = Field(default_factory=StageFlags)
