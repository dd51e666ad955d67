"""
Pydantic models for the first-order optimizers
"""

from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import Field, model_validator

from microinit.models.common import ArrayModel, StrictModel, Vector


class OptimizerVariant(str, Enum):
    SGD = "sgd"
    MOMENTUM = "momentum"
    NESTEROV = "nesterov"
    ADAGRAD = "adagrad"
    ADADELTA = "adadelta"
    RMSPROP = "rmsprop"
    ADAM = "adam"
    AMSGRAD = "amsgrad"
    YAMADAM = "yamadam"

    @classmethod
    def _missing_(cls, value):
        # "AdamX" is the name the AMSGrad update often goes by
        if isinstance(value, str):
            lowered = value.lower()
            if lowered == "adamx":
                return cls.AMSGRAD
            for member in cls:
                if member.value == lowered:
                    return member
        return None


# Literature defaults, every value overridable through OptimizerSpec.hyperparameters
DEFAULT_HYPERPARAMETERS: Dict[OptimizerVariant, Dict[str, float]] = {
    OptimizerVariant.SGD: {"learning_rate": 0.01},
    OptimizerVariant.MOMENTUM: {"learning_rate": 0.01, "momentum": 0.9},
    OptimizerVariant.NESTEROV: {"learning_rate": 0.01, "momentum": 0.9},
    OptimizerVariant.ADAGRAD: {"learning_rate": 0.01, "epsilon": 1e-8},
    OptimizerVariant.ADADELTA: {"rho": 0.95, "epsilon": 1e-6},
    OptimizerVariant.RMSPROP: {"learning_rate": 0.001, "rho": 0.9, "epsilon": 1e-8},
    OptimizerVariant.ADAM: {"learning_rate": 0.001, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
    OptimizerVariant.AMSGRAD: {"learning_rate": 0.001, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
    OptimizerVariant.YAMADAM: {"epsilon": 1e-6},
}

_DECAY_RATES = ("momentum", "rho", "beta1", "beta2")


class OptimizerSpec(StrictModel):
    """
    Optimizer choice plus hyperparameter overrides

    Only names known for the variant are accepted; missing ones take the defaults.
    """
    variant: OptimizerVariant = OptimizerVariant.ADAM
    hyperparameters: Dict[str, float] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_ranges(self):
        known = DEFAULT_HYPERPARAMETERS[self.variant]
        for name, value in self.hyperparameters.items():
            if name not in known:
                raise ValueError(f"{self.variant.value} has no hyperparameter '{name}'")
            if name in _DECAY_RATES and not 0.0 <= value < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {value}")
            if name in ("learning_rate", "epsilon") and value <= 0.0:
                raise ValueError(f"{name} must be positive, got {value}")
        return self

    def resolved(self) -> Dict[str, float]:
        return {**DEFAULT_HYPERPARAMETERS[self.variant], **self.hyperparameters}


class StopRule(StrictModel):
    threshold: float = Field(..., description="Stop once the objective is at or below this value")
    max_iters: int = Field(5000, ge=1)
    patience: int = Field(200, ge=1, description="Iterations allowed without relative progress")
    rel_tol: float = Field(1e-12, ge=0)


class OptRun(ArrayModel):
    """Outcome of one minimize() call"""
    best_point: Vector
    best_value: float
    trace: List[Tuple[int, float]] = Field(default_factory=list)
    converged: bool = False
    iterations_used: int = 0
    failed: bool = False
    message: Optional[str] = None
