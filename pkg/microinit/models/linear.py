"""
Pydantic models for time-varying linear systems and their observation matrices
"""

from typing import List

import numpy as np
from pydantic import Field, model_validator

from microinit.models.common import ArrayModel, Matrix, Vector


class LinearTVSystem(ArrayModel):
    """x_{k+1} = F_k x_k observed through y_k = H_k x_k"""
    F_seq: Matrix = Field(..., description="Stacked transition matrices, shape (K, N, N)")
    H_seq: Matrix = Field(..., description="Stacked observation rows, shape (K, N)")

    @model_validator(mode="after")
    def _check_shapes(self):
        if self.H_seq.ndim != 2:
            raise ValueError("H_seq must have shape (K, N)")
        n_x = self.H_seq.shape[1]
        if self.F_seq.ndim != 3 or self.F_seq.shape[1:] != (n_x, n_x):
            raise ValueError("F_seq must have shape (K, N, N) matching H_seq")
        if np.any(self.H_seq == 0.0):
            raise ValueError("every observation row entry must be non-zero")
        return self

    @property
    def dimension(self) -> int:
        return self.H_seq.shape[1]


class ObservationMatrix(ArrayModel):
    rows: Matrix
    row_indices: List[int]


class Recovery(ArrayModel):
    x0: Vector
    rank: int
    unique: bool
    residual: float
