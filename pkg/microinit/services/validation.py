"""
Validation Service
Out-of-sample error metrics, predictability horizon, Lyapunov exponent and spectra
"""

import logging
from typing import Optional, Sequence

import numpy as np
from scipy import linalg

from microinit.exceptions import ConfigError, DegenerateInputError, LyapunovError
from microinit.models.validation import HorizonReport, ModelSpaceStats, PowerSpectrum
from microinit.services.dynamics import SystemModel, iterate, sample_attractor, trajectory

logger = logging.getLogger(__name__)

# NSE at which two states are as far apart as two random attractor points
DIVERGENCE_THRESHOLD = 2.0
RIDGE = 1e-8


def nse_obs(y_k, yhat_k, sigma_y: float):
    """(y - yhat)^2 / sigma_y^2, elementwise for arrays"""
    if sigma_y <= 0:
        raise DegenerateInputError("sigma_y must be positive", sigma_y=sigma_y)
    return (np.asarray(y_k) - np.asarray(yhat_k)) ** 2 / sigma_y**2


def estimate_model_space_stats(
    model: SystemModel,
    rng: np.random.Generator,
    n_steps: int = 100_000,
    burn_in: Optional[int] = None,
) -> ModelSpaceStats:
    """Sample covariance along one attractor orbit plus a trace-scaled ridge"""
    start = sample_attractor(model, rng, burn_in)
    states = trajectory(model, start, n_steps, 1)
    covariance = np.atleast_2d(np.cov(states, rowvar=False))
    return stats_from_covariance(covariance)


def stats_from_covariance(covariance: np.ndarray) -> ModelSpaceStats:
    covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
    n = covariance.shape[0]
    ridge = RIDGE * float(np.trace(covariance)) / n
    rank = int(np.linalg.matrix_rank(covariance))
    if rank < n:
        logger.warning("covariance has rank %d < %d before regularization", rank, n)
    return ModelSpaceStats(covariance=covariance, regularization=ridge, rank_deficient=rank < n)


def _precision_factor(stats: ModelSpaceStats):
    n = stats.covariance.shape[0]
    regularized = stats.covariance + stats.regularization * np.eye(n)
    try:
        return linalg.cho_factor(regularized)
    except linalg.LinAlgError:
        raise DegenerateInputError(
            "covariance is not positive definite even after regularization"
        ) from None


def nse_mod(x: np.ndarray, xhat: np.ndarray, stats: ModelSpaceStats):
    """
    (1/N) d^T Sigma^-1 d with d = x - xhat

    Both states may carry leading axes; the metric is taken per state.
    """
    diff = np.asarray(x, dtype=float) - np.asarray(xhat, dtype=float)
    n = stats.covariance.shape[0]
    if diff.shape[-1] != n:
        raise ConfigError("state length does not match the covariance", expected=n)
    factor = _precision_factor(stats)
    flat = diff.reshape(-1, n)
    solved = linalg.cho_solve(factor, flat.T).T
    values = np.einsum("ij,ij->i", flat, solved) / n
    values = np.maximum(values, 0.0)
    return float(values[0]) if diff.ndim == 1 else values.reshape(diff.shape[:-1])


def predictability_horizon(
    runs: Sequence[Sequence[float]], threshold: float = DIVERGENCE_THRESHOLD
) -> HorizonReport:
    """
    First k with NSE_k >= threshold per run, then the ensemble mean

    Runs that never cross within K+1 samples are censored and count as K+1.
    """
    indices, censored = [], []
    window = 0
    for sequence in runs:
        values = np.asarray(sequence, dtype=float)
        window = max(window, values.size)
        crossed = np.flatnonzero(values >= threshold)
        if crossed.size:
            indices.append(int(crossed[0]))
            censored.append(False)
        else:
            indices.append(int(values.size))
            censored.append(True)
    if not indices:
        return HorizonReport(indices=[], censored=[], k_max=0.0, censored_count=0, cdf=[])
    crossing = np.array(indices)
    steps = np.arange(window)
    cdf = np.array([np.mean((crossing <= k) & ~np.array(censored)) for k in steps])
    return HorizonReport(
        indices=indices,
        censored=censored,
        k_max=float(np.mean(crossing)),
        censored_count=int(np.sum(censored)),
        cdf=cdf,
    )


def lyapunov_exponent(
    model: SystemModel,
    rng: np.random.Generator,
    renorm_interval: int = 10,
    total_steps: int = 100_000,
    transient_steps: int = 1000,
    d0: float = 1e-8,
    x0: Optional[np.ndarray] = None,
) -> float:
    """
    Largest exponent per unit time from the two-particle method

    The companion starts d0 away along a random direction, both advance
    renorm_interval steps, the log growth of their separation is accumulated and
    the companion is pulled back to distance d0 along the current separation.

    Args:
        renorm_interval: Steps between renormalizations
        total_steps: Steps that contribute to the average
        transient_steps: Steps discarded while the separation aligns
        d0: Renormalized separation
        x0: Reference start, drawn from the attractor when omitted

    Returns:
        Exponent per unit model time
    """
    if renorm_interval < 1 or total_steps < renorm_interval:
        raise ConfigError(
            "need total_steps >= renorm_interval >= 1",
            renorm_interval=renorm_interval,
            total_steps=total_steps,
        )
    x = sample_attractor(model, rng) if x0 is None else np.asarray(x0, dtype=float)
    direction = rng.standard_normal(model.dimension)
    pair = np.stack((x, x + d0 * direction / np.linalg.norm(direction)))

    log_growth = 0.0
    elapsed = 0.0
    steps_done = 0
    while steps_done < transient_steps + total_steps:
        pair = iterate(model, pair, renorm_interval)
        steps_done += renorm_interval
        separation = pair[1] - pair[0]
        distance = float(np.linalg.norm(separation))
        if distance == 0.0 or not np.isfinite(distance):
            raise LyapunovError("separation collapsed or overflowed", step=steps_done)
        if steps_done > transient_steps:
            log_growth += np.log(distance / d0)
            elapsed += renorm_interval * model.dt
        pair[1] = pair[0] + separation * (d0 / distance)
    return log_growth / elapsed


def ten_fold_time(lam: float, m: int, dt: float) -> float:
    """Samples needed for a one-decade separation growth: ln 10 / (m dt lambda)"""
    if lam <= 0:
        raise ConfigError("ten-fold time needs a positive exponent", exponent=lam)
    return float(np.log(10.0) / (m * dt * lam))


def normalized_periodogram(track: np.ndarray, spacing: float):
    """Mean-removed |FFT|^2 scaled to unit total power"""
    track = np.asarray(track, dtype=float)
    track = track - track.mean()
    power = np.abs(np.fft.rfft(track)) ** 2
    total = power.sum()
    if total == 0.0:
        raise DegenerateInputError("track is constant, spectrum undefined")
    return np.fft.rfftfreq(track.size, d=spacing), power / total


def power_spectrum(
    model: SystemModel,
    rng: np.random.Generator,
    op=None,
    n_runs: int = 100,
    n_points: int = 4096,
    component: int = 0,
    stride: int = 1,
) -> PowerSpectrum:
    """
    Ensemble-averaged normalized power spectrum

    Each run starts on the attractor and tracks one state component, or the
    observation when op is given.

    Args:
        n_runs: Independent tracks averaged
        n_points: Samples per track, a power of two
        stride: Model steps between samples

    Returns:
        Power per bin on a grid of frequencies per unit model time
    """
    if n_points < 2 or n_points & (n_points - 1):
        raise ConfigError("n_points must be a power of two", n_points=n_points)
    spacing = model.dt * stride
    total = None
    for run in range(n_runs):
        start = sample_attractor(model, rng)
        states = trajectory(model, start, n_points, stride)
        track = op(states) if op is not None else states[:, component]
        frequency, power = normalized_periodogram(track, spacing)
        total = power if total is None else total + power
    mean_power = total / n_runs
    return PowerSpectrum(frequency=frequency, power=mean_power, df=float(frequency[1] - frequency[0]))


def median_profile(matrix: np.ndarray) -> np.ndarray:
    """Per-column median across runs (rows)"""
    return np.median(np.asarray(matrix, dtype=float), axis=0)
