"""
Data models package
"""

from .experiment import EnsembleResult, ExcludedRun, ExperimentConfig, RunRecord, RunSettings
from .linear import LinearTVSystem, ObservationMatrix, Recovery
from .observation import (
    NoiseConfig,
    NoiseDistribution,
    ObservationSeries,
    ObservationSettings,
    OperatorKind,
)
from .optim import OptimizerSpec, OptimizerVariant, OptRun, StopRule
from .pipeline import Box, InitializationResult, PipelineConfig, StageFlags
from .system import LorenzParams, MackeyGlassParams, SystemParams
from .validation import FilterReport, HorizonReport, ModelSpaceStats, PowerSpectrum

__all__ = [
    "Box",
    "EnsembleResult",
    "ExcludedRun",
    "ExperimentConfig",
    "FilterReport",
    "HorizonReport",
    "InitializationResult",
    "LinearTVSystem",
    "LorenzParams",
    "MackeyGlassParams",
    "ModelSpaceStats",
    "NoiseConfig",
    "NoiseDistribution",
    "ObservationMatrix",
    "ObservationSeries",
    "ObservationSettings",
    "OperatorKind",
    "OptimizerSpec",
    "OptimizerVariant",
    "OptRun",
    "PipelineConfig",
    "PowerSpectrum",
    "Recovery",
    "RunRecord",
    "RunSettings",
    "StageFlags",
    "StopRule",
    "SystemParams",
]
