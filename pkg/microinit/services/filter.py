"""
Filter Service
Three-point low-pass moving average and the signal-to-noise gain it buys
"""

import logging

import numpy as np

from microinit.exceptions import ConfigError, DegenerateInputError, InvalidSeriesError
from microinit.models.observation import ObservationSeries
from microinit.models.validation import FilterReport

logger = logging.getLogger(__name__)


def lpma_once(values: np.ndarray) -> np.ndarray:
    """
    One LPMA pass

    Interior points get 1/2 of themselves plus 1/4 of each neighbour; the two
    endpoints average with their single neighbour.
    """
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size < 2:
        raise InvalidSeriesError("LPMA needs at least two samples", length=int(y.size))
    z = np.empty_like(y)
    z[1:-1] = 0.5 * y[1:-1] + 0.25 * (y[:-2] + y[2:])
    z[0] = 0.5 * y[0] + 0.5 * y[1]
    z[-1] = 0.5 * y[-1] + 0.5 * y[-2]
    return z


def lpma_values(values: np.ndarray, q: int) -> np.ndarray:
    if q < 0:
        raise ConfigError("number of filter passes must be non-negative", q=q)
    z = np.asarray(values, dtype=float)
    for _ in range(q):
        z = lpma_once(z)
    return z


def lpma(series: ObservationSeries, q: int) -> ObservationSeries:
    """q passes over the series; sigma_y is recomputed on the filtered values"""
    if q == 0:
        return series
    return series.with_values(lpma_values(series.values, q))


def snr_gain(clean: np.ndarray, noisy: np.ndarray, filtered: np.ndarray) -> float:
    """sqrt(sum eps^2 / sum eps_q^2) with residuals taken against the clean track"""
    clean = np.asarray(clean, dtype=float)
    noisy = np.asarray(noisy, dtype=float)
    filtered = np.asarray(filtered, dtype=float)
    if not clean.shape == noisy.shape == filtered.shape:
        raise ConfigError(
            "clean, noisy and filtered tracks must have equal lengths",
            lengths=[clean.size, noisy.size, filtered.size],
        )
    residual = np.sum((filtered - clean) ** 2)
    if residual == 0.0:
        raise DegenerateInputError("filtered track equals the clean track")
    return float(np.sqrt(np.sum((noisy - clean) ** 2) / residual))


def filter_report(clean: np.ndarray, noisy: np.ndarray, q: int) -> FilterReport:
    r0 = snr_gain(clean, noisy, lpma_values(noisy, q))
    logger.debug("LPMA q=%d measured r0=%.3f", q, r0)
    return FilterReport(q=q, r0=r0)
