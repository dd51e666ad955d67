"""
Pydantic models for experiment configuration and per-run records
"""

from typing import List, Literal, Optional

from pydantic import Field

from microinit.models.common import ArrayModel, StrictModel, Vector
from microinit.models.observation import NoiseConfig, ObservationSettings
from microinit.models.pipeline import InitializationResult, PipelineConfig
from microinit.models.system import LorenzParams, SystemParams


class RunSettings(StrictModel):
    """The [experiment] section: ensemble size, windows and study sizes"""
    ensemble_size: int = Field(100, ge=1)
    prediction_window: int = Field(600, ge=0, description="Samples predicted past t_0")
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    output_dir: Optional[str] = None
    stats_steps: int = Field(100_000, ge=10, description="Trajectory length for the covariance")
    filter_study_T: int = Field(50_000, ge=10)
    histogram_bins: int = Field(60, ge=2)
    spectrum_runs: int = Field(100, ge=1)
    spectrum_points: int = Field(4096, ge=2)
    lyapunov_steps: int = Field(100_000, ge=1)
    renorm_interval: int = Field(10, ge=1)


class ExperimentConfig(StrictModel):
    system: SystemParams = Field(default_factory=LorenzParams)
    observation: ObservationSettings = Field(default_factory=ObservationSettings)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    pipeline: PipelineConfig = Field(default_factory=PipelineConfig)
    experiment: RunSettings = Field(default_factory=RunSettings)

    def with_updates(self, **sections) -> "ExperimentConfig":
        """Return a copy with per-section field overrides, re-validated"""
        data = self.model_dump(mode="json")
        for section, values in sections.items():
            data[section] = {**data[section], **values}
        return ExperimentConfig.model_validate(data)


class RunRecord(ArrayModel):
    """
    One ensemble member for one noise variant

    nse_obs and nse_mod cover k = -T..prediction_window, index 0 is k = -T.
    """
    run_id: int
    T: int
    variant: Literal["noiseless", "noisy"]
    seed: int
    truth_start: Vector
    truth_present: Vector
    result: InitializationResult
    nse_obs: Vector
    nse_mod: Vector
    horizon: int
    censored: bool
    r0_measured: Optional[float] = None
    rough_nse0_mod: Optional[float] = None
    mirror_closer: Optional[bool] = None

    @property
    def nse0_obs(self) -> float:
        return float(self.nse_obs[self.T])

    @property
    def nse0_mod(self) -> float:
        return float(self.nse_mod[self.T])


class ExcludedRun(StrictModel):
    run_id: int
    variant: str
    error: str
    detail: str


class EnsembleResult(ArrayModel):
    """All records of an ensemble in (run_id, variant) order plus the failures"""
    ensemble_size: int
    records: List[RunRecord] = Field(default_factory=list)
    excluded: List[ExcludedRun] = Field(default_factory=list)

    def for_variant(self, variant: str) -> List[RunRecord]:
        return [r for r in self.records if r.variant == variant]

    def excluded_count(self, variant: str) -> int:
        return sum(1 for e in self.excluded if e.variant == variant)
