"""
Observation Service
Scalar aggregating operators, synthetic series and additive measurement noise
"""

import logging
from typing import Callable, Dict, Optional, Union

import numpy as np

from microinit.exceptions import ConfigError
from microinit.models.observation import NoiseDistribution, ObservationSeries, OperatorKind
from microinit.services.dynamics import SystemModel, trajectory

logger = logging.getLogger(__name__)


class ObservationOperator:
    """
    Scalar function of a microstate, evaluated along the last axis

    All three operators are positively homogeneous of degree one, which is what
    lets initial guesses be scaled onto a level set.
    """

    kind: OperatorKind
    degree: int = 1

    def __call__(self, x: np.ndarray) -> Union[float, np.ndarray]:
        raise NotImplementedError

    def is_odd(self, dimension: int) -> bool:
        return False

    def zero_level_point(self, direction: np.ndarray) -> Optional[np.ndarray]:
        """A non-zero point with H = 0 built from a direction, if one exists"""
        return None


class CubeSum(ObservationOperator):
    """cbrt(sum x_i^3)"""

    kind = OperatorKind.CUBE_SUM

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.cbrt(np.sum(x**3, axis=-1))

    def is_odd(self, dimension: int) -> bool:
        return True

    def zero_level_point(self, direction):
        # an opposite pair cancels exactly in any summation order
        if direction.size < 2:
            return None
        point = np.zeros_like(direction)
        point[0], point[1] = direction[0], -direction[0]
        return point


class Product(ObservationOperator):
    """sign(P)|P|^(1/N) with P the product of the components"""

    kind = OperatorKind.PRODUCT

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        product = np.prod(x, axis=-1)
        return np.sign(product) * np.abs(product) ** (1.0 / x.shape[-1])

    def is_odd(self, dimension: int) -> bool:
        return dimension % 2 == 1

    def zero_level_point(self, direction):
        point = direction.copy()
        point[int(np.argmin(np.abs(point)))] = 0.0
        return point


class PairwiseSum(ObservationOperator):
    """sign(C)sqrt|C| with C the sum of x_i x_j over i < j"""

    kind = OperatorKind.PAIRWISE_SUM

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        total = np.sum(x, axis=-1)
        coupling = 0.5 * (total**2 - np.sum(x**2, axis=-1))
        return np.sign(coupling) * np.sqrt(np.abs(coupling))

    def zero_level_point(self, direction):
        # one non-zero component has no pairs to couple
        point = np.zeros_like(direction)
        point[0] = direction[0]
        return point


_operators: Dict[OperatorKind, ObservationOperator] = {
    OperatorKind.CUBE_SUM: CubeSum(),
    OperatorKind.PRODUCT: Product(),
    OperatorKind.PAIRWISE_SUM: PairwiseSum(),
}


def get_operator(kind: Union[OperatorKind, str]) -> ObservationOperator:
    try:
        return _operators[OperatorKind(kind)]
    except ValueError:
        raise ConfigError(f"unknown observation operator '{kind}'") from None


def observe(op: Callable[[np.ndarray], np.ndarray], x: np.ndarray):
    """H(x); batched over leading axes"""
    return op(x)


def generate_series(
    model: SystemModel,
    op: Callable[[np.ndarray], np.ndarray],
    x_start: np.ndarray,
    T: int,
    m: int,
) -> ObservationSeries:
    """Noiseless observations of the orbit of x_start, one every m steps"""
    if T < 1 or m < 1:
        raise ConfigError("T and m must be at least 1", T=T, m=m)
    states = trajectory(model, x_start, T + 1, m)
    return ObservationSeries(values=op(states), m=m, dt=model.dt, noise_ratio=0.0)


def standardized_noise(
    size: int,
    dist: NoiseDistribution,
    rng: np.random.Generator,
    beta_a: float = 5.0,
    beta_b: float = 2.0,
    left_skewed: bool = True,
) -> np.ndarray:
    """Zero-mean, unit-variance i.i.d. draws"""
    dist = NoiseDistribution(dist)
    if dist is NoiseDistribution.GAUSSIAN:
        return rng.standard_normal(size)
    draws = rng.beta(beta_a, beta_b, size)
    mean = beta_a / (beta_a + beta_b)
    var = beta_a * beta_b / ((beta_a + beta_b) ** 2 * (beta_a + beta_b + 1.0))
    standardized = (draws - mean) / np.sqrt(var)
    # Beta(a, b) has negative skew exactly when a > b
    if left_skewed and beta_a < beta_b:
        standardized = -standardized
    return standardized


def add_noise(
    series: ObservationSeries,
    ratio: float,
    dist: NoiseDistribution,
    rng: np.random.Generator,
    beta_a: float = 5.0,
    beta_b: float = 2.0,
    left_skewed: bool = True,
) -> ObservationSeries:
    """
    Add i.i.d. noise with standard deviation ratio * sigma_y of the clean series

    Args:
        series: Clean observations
        ratio: sigma_n / sigma_y, zero returns the series unchanged
        dist: Gaussian or standardized Beta
        rng: Noise source

    Returns:
        Noisy series carrying the ratio in its metadata
    """
    if ratio < 0:
        raise ConfigError("noise ratio must be non-negative", ratio=ratio)
    if ratio == 0:
        return series
    noise = standardized_noise(series.values.size, dist, rng, beta_a, beta_b, left_skewed)
    noisy = series.values + ratio * series.sigma_y * noise
    logger.debug("added %s noise at ratio %.3f", NoiseDistribution(dist).value, ratio)
    return ObservationSeries(values=noisy, m=series.m, dt=series.dt, noise_ratio=ratio)
