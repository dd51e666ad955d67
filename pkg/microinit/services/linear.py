"""
Linear Recovery Service
Observation matrices of time-varying linear systems and exact initial-state recovery
"""

import logging
from functools import partial
from typing import List, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.stats import ortho_group

from microinit.exceptions import ConfigError
from microinit.models.linear import LinearTVSystem, ObservationMatrix, Recovery
from microinit.services.executor import parallel_map
from microinit.services.seeding import stage_rng

logger = logging.getLogger(__name__)

# singular values below RANK_CUTOFF * largest count as zero
RANK_CUTOFF = 1e-10


def reduced_indices(T: int, m: int) -> List[int]:
    """First T distinct entries of 0, m-1, 2m-1, ..., mT-1"""
    candidates = [0] + [j * m - 1 for j in range(1, T + 1)]
    indices: List[int] = []
    for k in candidates:
        if k not in indices:
            indices.append(k)
        if len(indices) == T:
            break
    return indices


def build_matrix(sys: LinearTVSystem, T: int, m: int, extended: bool = True) -> ObservationMatrix:
    """
    Rows M_k = H_k F_{k-1} ... F_0

    The extended matrix keeps every k in 0..mT-1, the reduced one only the
    sampled indices.
    """
    if T < 1 or m < 1:
        raise ConfigError("T and m must be at least 1", T=T, m=m)
    count = m * T
    if sys.H_seq.shape[0] < count or sys.F_seq.shape[0] < count - 1:
        raise ConfigError(
            "system is too short for the requested observation matrix",
            rows_needed=count,
            observation_rows=int(sys.H_seq.shape[0]),
            transitions=int(sys.F_seq.shape[0]),
        )
    n = sys.dimension
    rows = np.empty((count, n))
    propagator = np.eye(n)
    for k in range(count):
        rows[k] = sys.H_seq[k] @ propagator
        if k < count - 1:
            propagator = sys.F_seq[k] @ propagator
    keep = list(range(count)) if extended else reduced_indices(T, m)
    return ObservationMatrix(rows=rows[keep], row_indices=keep)


def observe_linear(matrix: ObservationMatrix, x0: np.ndarray) -> np.ndarray:
    return matrix.rows @ np.asarray(x0, dtype=float)


def recover(matrix: ObservationMatrix, y: Sequence[float]) -> Recovery:
    """Minimum-norm least-squares x0 with a rank-revealing solve"""
    y = np.asarray(y, dtype=float)
    if y.shape != (matrix.rows.shape[0],):
        raise ConfigError(
            "observation count does not match the matrix rows",
            rows=int(matrix.rows.shape[0]),
            observations=int(y.size),
        )
    x0, _, rank, _ = linalg.lstsq(matrix.rows, y, cond=RANK_CUTOFF)
    residual = float(np.linalg.norm(matrix.rows @ x0 - y))
    n = matrix.rows.shape[1]
    return Recovery(x0=x0, rank=int(rank), unique=int(rank) == n, residual=residual)


def random_system(rng: np.random.Generator, n_x: int, length: int) -> LinearTVSystem:
    """Orthogonal transitions with a mild diagonal scaling, rows uniform in [0.5, 1.5]"""
    transitions = []
    for _ in range(length):
        if n_x == 1:
            rotation = np.array([[rng.choice([-1.0, 1.0])]])
        else:
            rotation = ortho_group.rvs(n_x, random_state=rng)
        transitions.append(rotation @ np.diag(rng.uniform(0.9, 1.1, n_x)))
    F_seq = np.array(transitions).reshape(length, n_x, n_x)
    H_seq = rng.uniform(0.5, 1.5, (length, n_x))
    return LinearTVSystem(F_seq=F_seq, H_seq=H_seq)


def _study_cell(cell: Tuple[int, int], n_x: int, draws: int, seed: int, extended: bool):
    T, m = cell
    rng = stage_rng(seed, f"linear:{T}:{m}")
    errors, ranks = [], []
    for _ in range(draws):
        system = random_system(rng, n_x, m * T)
        truth = rng.standard_normal(n_x)
        matrix = build_matrix(system, T, m, extended)
        result = recover(matrix, observe_linear(matrix, truth))
        errors.append(np.linalg.norm(result.x0 - truth) / np.linalg.norm(truth))
        ranks.append(result.rank)
    return {
        "T": T,
        "m": m,
        "median_error": float(np.median(errors)),
        "rank": int(np.median(ranks)),
        "unique_fraction": float(np.mean(np.array(ranks) == n_x)),
    }


def transition_study(
    n_x: int,
    m_range: Sequence[int],
    T_range: Sequence[int],
    draws: int = 20,
    seed: int = 0,
    extended: bool = True,
    workers: int = 1,
) -> pd.DataFrame:
    """Median relative recovery error on a (T, m) grid of random systems"""
    cells = [(T, m) for T in T_range for m in m_range]
    rows = parallel_map(
        partial(_study_cell, n_x=n_x, draws=draws, seed=seed, extended=extended),
        cells,
        workers,
    )
    logger.info("linear transition study finished %d cells", len(rows))
    return pd.DataFrame(rows, columns=["T", "m", "median_error", "rank", "unique_fraction"])
