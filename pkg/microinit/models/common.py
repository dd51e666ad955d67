"""
Shared pydantic plumbing for models that carry numpy arrays
"""

from typing import Annotated, Any, List

import numpy as np
from pydantic import BaseModel, BeforeValidator, ConfigDict, PlainSerializer


def _frozen_array(value: Any) -> np.ndarray:
    # copy so that freezing never touches the caller's array
    array = np.array(value, dtype=float)
    array.flags.writeable = False
    return array


def _to_list(array: np.ndarray) -> List[Any]:
    return array.tolist()


Vector = Annotated[
    np.ndarray,
    BeforeValidator(_frozen_array),
    PlainSerializer(_to_list, return_type=list),
]
Matrix = Vector


class ArrayModel(BaseModel):
    """Immutable record that may hold numpy arrays"""

    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        frozen=True,
        extra="forbid",
        ser_json_inf_nan="constants",
    )


class StrictModel(BaseModel):
    """Immutable configuration record; unknown keys are rejected"""

    model_config = ConfigDict(frozen=True, extra="forbid")
