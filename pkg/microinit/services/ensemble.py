"""
Ensemble Service
Seeded ensembles of synthetic initialization runs and their aggregates
"""

import logging
from functools import partial
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from microinit.exceptions import MicroinitError
from microinit.models.experiment import (
    EnsembleResult,
    ExcludedRun,
    ExperimentConfig,
    RunRecord,
)
from microinit.models.observation import ObservationSeries
from microinit.models.validation import HorizonReport, ModelSpaceStats
from microinit.services.dynamics import build_model, iterate, sample_attractor, trajectory
from microinit.services.executor import parallel_map
from microinit.services.filter import lpma_values, snr_gain
from microinit.services.observation import add_noise, get_operator
from microinit.services.pipeline import initialize
from microinit.services.seeding import derive_seed, stage_rng
from microinit.services.validation import (
    DIVERGENCE_THRESHOLD,
    estimate_model_space_stats,
    median_profile,
    nse_mod,
    nse_obs,
    predictability_horizon,
)

logger = logging.getLogger(__name__)

# (x, y, z) -> (-x, -y, z) leaves the Lorenz equations and the product operator unchanged
LORENZ_MIRROR = np.array([-1.0, -1.0, 1.0])


def model_space_stats(config: ExperimentConfig) -> ModelSpaceStats:
    model = build_model(config.system)
    rng = stage_rng(config.experiment.seed, "stats")
    return estimate_model_space_stats(model, rng, config.experiment.stats_steps)


def _first_crossing(values: np.ndarray) -> Tuple[int, bool]:
    crossed = np.flatnonzero(values >= DIVERGENCE_THRESHOLD)
    if crossed.size:
        return int(crossed[0]), False
    return int(values.size), True


def run_single(
    run_id: int, config: ExperimentConfig, stats: ModelSpaceStats
) -> Tuple[List[RunRecord], List[ExcludedRun]]:
    """
    One ground truth, one record per requested noise variant

    Every variant observes the same truth; failures are returned, not raised.
    """
    master = config.experiment.seed
    T, m = config.observation.T, config.observation.m
    K = config.experiment.prediction_window
    noise = config.noise
    model = build_model(config.system)
    op = get_operator(config.observation.operator)

    try:
        truth_start = sample_attractor(model, stage_rng(master, "truth", run_id))
        truth = trajectory(model, truth_start, T + K + 1, m)
    except MicroinitError as exc:
        logger.warning("run %d: ground truth failed: %s", run_id, exc.detail)
        return [], [
            ExcludedRun(run_id=run_id, variant=v, error=type(exc).__name__, detail=exc.detail)
            for v in noise.variants
        ]
    clean_track = op(truth)
    records, excluded = [], []

    for variant in noise.variants:
        try:
            clean = ObservationSeries(values=clean_track[: T + 1], m=m, dt=model.dt)
            r0_measured = None
            raw = clean
            if variant == "noisy":
                raw = add_noise(
                    clean,
                    noise.ratio,
                    noise.distribution,
                    stage_rng(master, "noise", run_id),
                    noise.beta_a,
                    noise.beta_b,
                    noise.left_skewed,
                )
                if noise.ratio > 0:
                    r0_measured = snr_gain(
                        clean.values, raw.values, lpma_values(raw.values, config.pipeline.q)
                    )
            seed = derive_seed(master, run_id, f"pipeline:{variant}")
            pipeline = config.pipeline.model_copy(update={"seed": seed})
            result = initialize(model, op, raw, pipeline)

            estimate = trajectory(model, result.assimilated, T + K + 1, m)
            obs_error = nse_obs(clean_track, op(estimate), clean.sigma_y)
            mod_error = nse_mod(truth, estimate, stats)
            horizon, censored = _first_crossing(obs_error[T:])
            rough_present = iterate(model, result.rough, m * T)
            mirror_closer = None
            if model.dimension == 3:
                mirrored = truth[T] * LORENZ_MIRROR
                mirror_closer = bool(
                    np.linalg.norm(result.initialized - mirrored)
                    < np.linalg.norm(result.initialized - truth[T])
                )
            records.append(
                RunRecord(
                    run_id=run_id,
                    T=T,
                    variant=variant,
                    seed=seed,
                    truth_start=truth_start,
                    truth_present=truth[T],
                    result=result,
                    nse_obs=obs_error,
                    nse_mod=mod_error,
                    horizon=horizon,
                    censored=censored,
                    r0_measured=r0_measured,
                    rough_nse0_mod=nse_mod(truth[T], rough_present, stats),
                    mirror_closer=mirror_closer,
                )
            )
        except MicroinitError as exc:
            logger.warning("run %d (%s) excluded: %s", run_id, variant, exc.detail)
            excluded.append(
                ExcludedRun(run_id=run_id, variant=variant, error=type(exc).__name__, detail=exc.detail)
            )
    return records, excluded


def run_ensemble(
    config: ExperimentConfig,
    stats: Optional[ModelSpaceStats] = None,
    workers: Optional[int] = None,
) -> EnsembleResult:
    """
    ensemble_size independent runs fanned out to the worker pool

    Results are gathered in run order, so nothing downstream depends on the
    number of workers.

    Args:
        config: Full experiment config, its seed drives every run
        stats: Model-space statistics, estimated from config when omitted
        workers: Process count, defaults to config.experiment.workers

    Returns:
        Records of the included runs and the reasons runs were excluded
    """
    stats = model_space_stats(config) if stats is None else stats
    workers = config.experiment.workers if workers is None else workers
    size = config.experiment.ensemble_size
    logger.info("running %d-member ensemble on %d worker(s)", size, workers)
    outcomes = parallel_map(
        partial(run_single, config=config, stats=stats), range(size), workers
    )
    records, excluded = [], []
    for run_records, run_excluded in outcomes:
        records.extend(run_records)
        excluded.extend(run_excluded)
    if excluded:
        logger.warning("%d run/variant pairs excluded from aggregates", len(excluded))
    return EnsembleResult(ensemble_size=size, records=records, excluded=excluded)


def error_profile(ensemble: EnsembleResult, variant: str) -> pd.DataFrame:
    """(k, median_nse_obs, median_nse_mod) over k = -T..K"""
    records = ensemble.for_variant(variant)
    if not records:
        return pd.DataFrame(columns=["k", "median_nse_obs", "median_nse_mod"])
    T = records[0].T
    obs = median_profile(np.stack([r.nse_obs for r in records]))
    mod = median_profile(np.stack([r.nse_mod for r in records]))
    k = np.arange(-T, obs.size - T)
    return pd.DataFrame({"k": k, "median_nse_obs": obs, "median_nse_mod": mod})


def horizon_report(ensemble: EnsembleResult, variant: str) -> HorizonReport:
    return predictability_horizon([r.nse_obs[r.T:] for r in ensemble.for_variant(variant)])


def horizon_cdf(report: HorizonReport) -> pd.DataFrame:
    return pd.DataFrame({"k": np.arange(report.cdf.size), "cdf": report.cdf})


def summary(ensemble: EnsembleResult, variants) -> pd.DataFrame:
    """One row per variant; included + excluded always equals ensemble_size"""
    rows = []
    for variant in variants:
        records = ensemble.for_variant(variant)
        report = horizon_report(ensemble, variant)
        nse0 = np.array([r.nse0_mod for r in records])
        gains = [r.r0_measured for r in records if r.r0_measured is not None]
        mirror = [r.mirror_closer for r in records if r.mirror_closer is not None]
        rows.append(
            {
                "variant": variant,
                "included": len(records),
                "excluded": ensemble.excluded_count(variant),
                "k_max": report.k_max if records else np.nan,
                "censored": report.censored_count,
                "mean_nse0_mod": float(nse0.mean()) if nse0.size else np.nan,
                "median_nse0_mod": float(np.median(nse0)) if nse0.size else np.nan,
                "refined_fraction": (
                    float(np.mean([r.result.flags.refined for r in records])) if records else np.nan
                ),
                "median_r0": float(np.median(gains)) if gains else np.nan,
                "mirror_fraction": float(np.mean(mirror)) if mirror else np.nan,
            }
        )
    return pd.DataFrame(rows)

