"""
Exception hierarchy

Every error carries the exit code the CLI returns for it.
"""

from typing import Any, Dict, Optional


class MicroinitError(Exception):
    """Base class for all library errors"""

    exit_code = 1

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form printed by the CLI"""
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code,
            **{k: v for k, v in self.context.items() if v is not None},
        }


class ConfigError(MicroinitError):
    """Invalid, unknown or missing configuration"""

    exit_code = 2


class InvalidSeriesError(MicroinitError):
    """Observation series violates its invariants (too short, constant, ...)"""

    exit_code = 3


class TrajectoryOverflowError(MicroinitError):
    """A simulated trajectory left the finite floating-point range"""

    exit_code = 4

    def __init__(self, detail: str, step_index: Optional[int] = None, **context: Any):
        super().__init__(detail, step_index=step_index, **context)
        self.step_index = step_index


class CostEvaluationError(MicroinitError):
    """The cost could not be evaluated (as opposed to being merely large)"""

    exit_code = 4


class DegenerateInputError(MicroinitError):
    """Input makes a quantity undefined (zero residual norm, singular covariance, ...)"""

    exit_code = 5


class GuessError(MicroinitError):
    """No admissible initial guess on the level set of the first observation"""

    exit_code = 6


class LyapunovError(MicroinitError):
    """Separation under- or overflow in the two-particle estimate"""

    exit_code = 7
