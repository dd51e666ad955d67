"""
Objective Service
Least-squares mismatch between a series and the orbit of a candidate state
"""

import logging
from typing import Callable, Optional

import numpy as np

from microinit.exceptions import ConfigError, CostEvaluationError, TrajectoryOverflowError
from microinit.models.common import ArrayModel, Vector
from microinit.models.observation import ObservationSeries
from microinit.services.dynamics import SystemModel, trajectory

logger = logging.getLogger(__name__)

# sqrt of double precision machine epsilon
FD_STEP = 1.5e-8

PredictionHook = Callable[[np.ndarray], np.ndarray]


class CostEvaluation(ArrayModel):
    """value = sum(residuals^2) / ((T+1) sigma_y^2)"""
    value: float
    residuals: Vector


def predict_observations(model: SystemModel, op, x: np.ndarray, T: int, m: int) -> np.ndarray:
    """
    H(f^{m(k+T)}(x)) for k = -T..0

    Accepts a batch of states; the result then has shape (..., T+1).
    """
    states = trajectory(model, x, T + 1, m)
    return np.moveaxis(np.asarray(op(states), dtype=float), 0, -1)


def cost_from_predictions(series: ObservationSeries, predictions: np.ndarray) -> CostEvaluation:
    predictions = np.asarray(predictions, dtype=float)
    if predictions.shape != series.values.shape:
        raise ConfigError(
            "prediction length does not match the series",
            expected=series.values.size,
            got=int(predictions.size),
        )
    if not np.all(np.isfinite(predictions)):
        raise CostEvaluationError("predicted observations are not finite")
    residuals = series.values - predictions
    value = float(np.sum(residuals**2) / (series.values.size * series.sigma_y**2))
    return CostEvaluation(value=value, residuals=residuals)


def cost(
    model: SystemModel,
    op,
    series: ObservationSeries,
    x: np.ndarray,
    predict: Optional[PredictionHook] = None,
) -> CostEvaluation:
    """
    Normalized cost J(x)

    predict replaces the model/operator pair when given; it maps a state to the
    T+1 predicted observations.
    """
    try:
        if predict is not None:
            predictions = predict(x)
        else:
            predictions = predict_observations(model, op, x, series.T, series.m)
    except TrajectoryOverflowError as exc:
        raise CostEvaluationError(
            "prediction diverged while evaluating the cost", step_index=exc.step_index
        ) from None
    return cost_from_predictions(series, predictions)


def cost_batch(model: SystemModel, op, series: ObservationSeries, xs: np.ndarray) -> np.ndarray:
    """J for a stack of states of shape (B, N_x)"""
    try:
        predictions = predict_observations(model, op, xs, series.T, series.m)
    except TrajectoryOverflowError as exc:
        raise CostEvaluationError(
            "perturbed prediction diverged", step_index=exc.step_index
        ) from None
    if not np.all(np.isfinite(predictions)):
        raise CostEvaluationError("perturbed predictions are not finite")
    residuals = series.values - predictions
    return np.sum(residuals**2, axis=-1) / (series.values.size * series.sigma_y**2)


def fd_steps(x: np.ndarray) -> np.ndarray:
    return FD_STEP * np.maximum(1.0, np.abs(x))


def cost_gradient(
    model: SystemModel,
    op,
    series: ObservationSeries,
    x: np.ndarray,
    predict: Optional[PredictionHook] = None,
) -> np.ndarray:
    """
    Central finite-difference gradient of J

    The 2 N_x perturbed states advance together as one batch and are reduced in
    index order, so gradients are reproducible bit for bit.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    h = fd_steps(x)
    shifts = np.diag(h)
    perturbed = np.concatenate((x + shifts, x - shifts), axis=0)
    if predict is None:
        values = cost_batch(model, op, series, perturbed)
    else:
        values = np.array([cost(model, op, series, p, predict).value for p in perturbed])
    return (values[:n] - values[n:]) / (2.0 * h)


def expected_cost_floor(series: ObservationSeries, r0: float) -> float:
    """Lowest cost expected after filtering: (sigma_n/sigma_y)^2 / r0^2"""
    if r0 < 1:
        raise ConfigError("r0 must be at least 1", r0=r0)
    return series.noise_ratio**2 / r0**2
