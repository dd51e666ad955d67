"""
Dynamics Service
Discrete-time deterministic maps for the reference systems plus trajectory utilities
"""

import logging
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from microinit.exceptions import ConfigError, TrajectoryOverflowError
from microinit.models.system import LorenzParams, MackeyGlassParams, SystemParams

logger = logging.getLogger(__name__)

# attractor sampling gives up after this many escaped draws
SAMPLE_RETRIES = 10


class SystemModel(ABC):
    """
    One fixed-step update of a deterministic system

    Every model works on arrays whose last axis is the microstate, so a batch of
    states (for instance the perturbed states of a finite-difference gradient)
    advances in a single call.
    """

    dt: float
    burn_in: int = 5000

    @property
    @abstractmethod
    def dimension(self) -> int:
        ...

    @abstractmethod
    def _advance(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def sampling_box(self) -> Tuple[np.ndarray, np.ndarray]:
        ...

    def step(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1:] != (self.dimension,):
            raise ConfigError(
                "state length does not match the model",
                expected=self.dimension,
                got=int(x.shape[-1]) if x.ndim else 0,
            )
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._advance(x)
        if not np.all(np.isfinite(out)):
            raise TrajectoryOverflowError("trajectory diverged to non-finite values", step_index=1)
        return out


class LorenzModel(SystemModel):
    """Lorenz system advanced with classic fourth-order Runge-Kutta"""

    def __init__(self, params: LorenzParams = LorenzParams()):
        self.params = params
        self.sigma = params.sigma
        self.rho = params.rho
        self.beta = params.beta
        self.dt = params.dt
        self.burn_in = params.burn_in

    @property
    def dimension(self) -> int:
        return 3

    def _rhs(self, x: np.ndarray) -> np.ndarray:
        u, v, w = x[..., 0], x[..., 1], x[..., 2]
        return np.stack(
            (self.sigma * (v - u), u * (self.rho - w) - v, u * v - self.beta * w),
            axis=-1,
        )

    def _advance(self, x: np.ndarray) -> np.ndarray:
        dt = self.dt
        k1 = self._rhs(x)
        k2 = self._rhs(x + 0.5 * dt * k1)
        k3 = self._rhs(x + 0.5 * dt * k2)
        k4 = self._rhs(x + dt * k3)
        return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def sampling_box(self):
        return np.array(self.params.box_low), np.array(self.params.box_high)


class MackeyGlassModel(SystemModel):
    """
    Mackey-Glass delay equation held as a delay line of n_x samples

    Index 0 is the oldest sample x(t - t_d) and index n_x - 1 is x(t). One step
    appends an Euler update of the newest sample driven by the oldest one and
    drops the oldest. n_x steps therefore rebuild the whole line, which is the
    sequential sweep in which component i+1 uses the freshly updated i.
    """

    def __init__(self, params: MackeyGlassParams = MackeyGlassParams()):
        self.params = params
        self.a = params.a
        self.b = params.b
        self.c = params.c
        self.n_x = params.n_x
        self.dt = params.t_d / params.n_x
        self.burn_in = params.burn_in

    @property
    def dimension(self) -> int:
        return self.n_x

    def _rate(self, current: np.ndarray, delayed: np.ndarray) -> np.ndarray:
        return self.a * delayed / (1.0 + delayed**self.c) - self.b * current

    def _advance(self, x: np.ndarray) -> np.ndarray:
        newest = x[..., -1] + self.dt * self._rate(x[..., -1], x[..., 0])
        return np.concatenate((x[..., 1:], newest[..., None]), axis=-1)

    def sweep(self, x: np.ndarray) -> np.ndarray:
        """Sequential component-by-component update over one full delay"""
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        previous = x[..., -1]
        with np.errstate(over="ignore", invalid="ignore"):
            for i in range(self.n_x):
                previous = previous + self.dt * self._rate(previous, x[..., i])
                out[..., i] = previous
        if not np.all(np.isfinite(out)):
            raise TrajectoryOverflowError("delay-line sweep diverged", step_index=self.n_x)
        return out

    def sampling_box(self):
        n = self.n_x
        return np.full(n, self.params.box_low), np.full(n, self.params.box_high)


class LinearModel(SystemModel):
    """x -> A x with a nominal time step, mostly for analytic checks"""

    def __init__(self, matrix, dt: float = 1.0, burn_in: int = 1):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ConfigError("linear model needs a square matrix", shape=list(matrix.shape))
        if dt <= 0:
            raise ConfigError("dt must be positive", dt=dt)
        matrix.flags.writeable = False
        self.matrix = matrix
        self.dt = dt
        self.burn_in = burn_in

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def _advance(self, x: np.ndarray) -> np.ndarray:
        return x @ self.matrix.T

    def sampling_box(self):
        n = self.dimension
        return -np.ones(n), np.ones(n)


@lru_cache(maxsize=None)
def build_model(params: SystemParams) -> SystemModel:
    """Models are immutable, so one instance per parameter set is shared"""
    if isinstance(params, LorenzParams):
        return LorenzModel(params)
    if isinstance(params, MackeyGlassParams):
        return MackeyGlassModel(params)
    raise ConfigError(f"unknown system {params!r}")


def step(model: SystemModel, x: np.ndarray) -> np.ndarray:
    return model.step(x)


def iterate(model: SystemModel, x: np.ndarray, n: int) -> np.ndarray:
    """Apply the model n times; n = 0 returns x itself"""
    if n < 0:
        raise ConfigError("iteration count must be non-negative", n=n)
    x = np.asarray(x, dtype=float)
    for i in range(n):
        try:
            x = model.step(x)
        except TrajectoryOverflowError:
            raise TrajectoryOverflowError(
                "trajectory diverged to non-finite values", step_index=i + 1
            ) from None
    return x


def trajectory(model: SystemModel, x: np.ndarray, count: int, stride: int) -> np.ndarray:
    """
    States x, iterate(x, stride), ..., iterate(x, (count-1)*stride)

    Returns an array of shape (count, ..., N_x).
    """
    if count < 1 or stride < 1:
        raise ConfigError("count and stride must be at least 1", count=count, stride=stride)
    x = np.asarray(x, dtype=float)
    states = np.empty((count,) + x.shape)
    states[0] = x
    for j in range(1, count):
        try:
            x = iterate(model, x, stride)
        except TrajectoryOverflowError as exc:
            raise TrajectoryOverflowError(
                "trajectory diverged to non-finite values",
                step_index=(j - 1) * stride + exc.step_index,
            ) from None
        states[j] = x
    return states


def sample_attractor(
    model: SystemModel,
    rng: np.random.Generator,
    burn_in: Optional[int] = None,
    retries: int = SAMPLE_RETRIES,
) -> np.ndarray:
    """Uniform draw in the model's box followed by a burn-in transient"""
    burn_in = model.burn_in if burn_in is None else burn_in
    if burn_in < 1:
        raise ConfigError("burn_in must be at least 1", burn_in=burn_in)
    low, high = model.sampling_box()
    for attempt in range(retries):
        start = rng.uniform(low, high)
        try:
            return iterate(model, start, burn_in)
        except TrajectoryOverflowError as exc:
            logger.warning(
                "attractor sample %d escaped at step %s, redrawing", attempt, exc.step_index
            )
    raise TrajectoryOverflowError("every attractor sample escaped", attempts=retries)
