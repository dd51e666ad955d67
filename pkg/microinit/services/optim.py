"""
Optimizer Service
First-order optimizers driven by an objective and its gradient
"""

import logging
from typing import Callable, Dict, Optional, Type, Union

import numpy as np
from scipy.special import expit

from microinit.exceptions import MicroinitError
from microinit.models.optim import (
    DEFAULT_HYPERPARAMETERS,
    OptimizerSpec,
    OptimizerVariant,
    OptRun,
    StopRule,
)

logger = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], float]
Gradient = Callable[[np.ndarray], np.ndarray]


class Optimizer:
    """Holds per-component state; step(grad) returns the update to add to x"""

    def __init__(self, shape, **hyperparameters):
        self.shape = shape
        self.t = 0

    def step(self, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        return self._get_step(grad)

    def _get_step(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class SGD(Optimizer):
    """Plain gradient descent on the full deterministic gradient"""

    def __init__(self, shape, learning_rate):
        super().__init__(shape)
        self.lr = learning_rate

    def _get_step(self, grad):
        return -self.lr * grad


class Momentum(Optimizer):
    def __init__(self, shape, learning_rate, momentum):
        super().__init__(shape)
        self.lr = learning_rate
        self._gamma = momentum
        self._velocity = np.zeros(shape)

    def _get_step(self, grad):
        self._velocity = self._gamma * self._velocity + self.lr * grad
        return -self._velocity


class Nesterov(Optimizer):
    """Nesterov accelerated gradient written in terms of the current iterate"""

    def __init__(self, shape, learning_rate, momentum):
        super().__init__(shape)
        self.lr = learning_rate
        self._gamma = momentum
        self._velocity = np.zeros(shape)

    def _get_step(self, grad):
        previous = self._velocity
        self._velocity = self._gamma * previous - self.lr * grad
        return -self._gamma * previous + (1.0 + self._gamma) * self._velocity


class Adagrad(Optimizer):
    def __init__(self, shape, learning_rate, epsilon):
        super().__init__(shape)
        self.lr = learning_rate
        self._epsilon = epsilon
        self._sum_sq = np.zeros(shape)

    def _get_step(self, grad):
        self._sum_sq = self._sum_sq + grad**2
        return -self.lr * grad / (np.sqrt(self._sum_sq) + self._epsilon)


class Adadelta(Optimizer):
    """Step size from the ratio of running RMS of updates and of gradients"""

    def __init__(self, shape, rho, epsilon):
        super().__init__(shape)
        self._rho = rho
        self._epsilon = epsilon
        self._square_avg = np.zeros(shape)
        self._acc_delta = np.zeros(shape)

    def _get_step(self, grad):
        rho, eps = self._rho, self._epsilon
        self._square_avg = rho * self._square_avg + (1.0 - rho) * grad**2
        delta = -np.sqrt(self._acc_delta + eps) / np.sqrt(self._square_avg + eps) * grad
        self._acc_delta = rho * self._acc_delta + (1.0 - rho) * delta**2
        return delta


class RMSprop(Optimizer):
    def __init__(self, shape, learning_rate, rho, epsilon):
        super().__init__(shape)
        self.lr = learning_rate
        self._rho = rho
        self._epsilon = epsilon
        self._rms = np.zeros(shape)

    def _get_step(self, grad):
        self._rms = self._rho * self._rms + (1.0 - self._rho) * grad**2
        return -self.lr * grad / (np.sqrt(self._rms) + self._epsilon)


class Adam(Optimizer):
    def __init__(self, shape, learning_rate, beta1, beta2, epsilon):
        super().__init__(shape)
        self.lr = learning_rate
        self._b1, self._b2, self._epsilon = beta1, beta2, epsilon
        self._m = np.zeros(shape)
        self._v = np.zeros(shape)

    def _moments(self, grad):
        self._m = self._m + (1.0 - self._b1) * (grad - self._m)
        self._v = self._v + (1.0 - self._b2) * (grad**2 - self._v)
        # bias correction
        m_hat = self._m / (1.0 - self._b1**self.t)
        return m_hat, self._v

    def _get_step(self, grad):
        m_hat, v = self._moments(grad)
        v_hat = v / (1.0 - self._b2**self.t)
        return -self.lr * m_hat / (np.sqrt(v_hat) + self._epsilon)


class AMSGrad(Adam):
    """Adam normalized by the running maximum of the second moment"""

    def __init__(self, shape, learning_rate, beta1, beta2, epsilon):
        super().__init__(shape, learning_rate, beta1, beta2, epsilon)
        self._v_max = np.zeros(shape)

    def _get_step(self, grad):
        m_hat, v = self._moments(grad)
        self._v_max = np.maximum(self._v_max, v)
        v_hat = self._v_max / (1.0 - self._b2**self.t)
        return -self.lr * m_hat / (np.sqrt(v_hat) + self._epsilon)


class YamAdam(Optimizer):
    """
    Hyperparameter-free moment method

    The step size is the running RMS of past updates over the running RMS of
    gradients (as in Adadelta) applied to a momentum average, and the averaging
    weight of every moment adapts per component from the size of the last update
    relative to its running RMS.
    """

    def __init__(self, shape, epsilon):
        super().__init__(shape)
        self._epsilon = epsilon
        self._beta = np.full(shape, 0.5)
        self._m = np.zeros(shape)
        self._v = np.zeros(shape)
        self._s = np.zeros(shape)
        self._delta = np.zeros(shape)

    def _get_step(self, grad):
        beta, eps = self._beta, self._epsilon
        self._m = beta * self._m + (1.0 - beta) * grad
        self._v = beta * self._v + (1.0 - beta) * grad**2
        self._s = beta * self._s + (1.0 - beta) * self._delta**2
        rate = np.sqrt(self._s + eps) / np.sqrt(self._v + eps)
        self._delta = -rate * self._m
        # beta stays in [0.5, 1)
        self._beta = expit(np.abs(self._delta) / np.sqrt(self._s + eps))
        return self._delta


OPTIMIZERS: Dict[OptimizerVariant, Type[Optimizer]] = {
    OptimizerVariant.SGD: SGD,
    OptimizerVariant.MOMENTUM: Momentum,
    OptimizerVariant.NESTEROV: Nesterov,
    OptimizerVariant.ADAGRAD: Adagrad,
    OptimizerVariant.ADADELTA: Adadelta,
    OptimizerVariant.RMSPROP: RMSprop,
    OptimizerVariant.ADAM: Adam,
    OptimizerVariant.AMSGRAD: AMSGrad,
    OptimizerVariant.YAMADAM: YamAdam,
}


def default_hyperparameters(variant: Union[OptimizerVariant, str]) -> OptimizerSpec:
    variant = OptimizerVariant(variant)
    return OptimizerSpec(variant=variant, hyperparameters=dict(DEFAULT_HYPERPARAMETERS[variant]))


def build_optimizer(spec: OptimizerSpec, shape) -> Optimizer:
    return OPTIMIZERS[spec.variant](shape, **spec.resolved())


def minimize(
    objective: Objective,
    gradient: Gradient,
    x0: np.ndarray,
    spec: OptimizerSpec,
    stop: StopRule,
) -> OptRun:
    """
    Run the optimizer until the threshold, the iteration cap or a plateau

    An evaluation failure ends the run with failed=True and the trace so far.

    Args:
        objective: Scalar function to minimize
        gradient: Its gradient, same shape as x0
        x0: Starting point
        spec: Optimizer variant and hyperparameters
        stop: Threshold, iteration cap and patience

    Returns:
        Best point and value, the per-iteration trace and the convergence flags
    """
    x = np.array(x0, dtype=float)
    optimizer = build_optimizer(spec, x.shape)
    trace = []
    best_x: Optional[np.ndarray] = x.copy()
    best = float("inf")

    def finish(converged: bool, iterations: int, failed=False, message=None) -> OptRun:
        return OptRun(
            best_point=best_x,
            best_value=best,
            trace=trace,
            converged=converged,
            iterations_used=iterations,
            failed=failed,
            message=message,
        )

    try:
        value = float(objective(x))
    except MicroinitError as exc:
        logger.warning("objective failed at the starting point: %s", exc.detail)
        return finish(False, 0, failed=True, message=exc.detail)
    trace.append((0, value))
    best = value
    if best <= stop.threshold:
        return finish(True, 0)

    anchor_value, anchor_iter = best, 0
    for it in range(1, stop.max_iters + 1):
        try:
            x = x + optimizer.step(gradient(x))
            value = float(objective(x))
        except MicroinitError as exc:
            logger.warning("%s stopped at iteration %d: %s", spec.variant.value, it, exc.detail)
            return finish(False, it - 1, failed=True, message=exc.detail)
        if not np.isfinite(value):
            return finish(False, it - 1, failed=True, message="objective is not finite")
        trace.append((it, value))
        if value < best:
            best, best_x = value, x.copy()
        if best <= stop.threshold:
            return finish(True, it)
        if best < anchor_value * (1.0 - stop.rel_tol):
            anchor_value, anchor_iter = best, it
        elif it - anchor_iter >= stop.patience:
            logger.debug("%s plateaued at %.3e after %d iterations", spec.variant.value, best, it)
            return finish(False, it, message="plateau")
    return finish(False, stop.max_iters, message="iteration budget exhausted")
