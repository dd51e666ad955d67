"""
Experiment Service
Recipes that sweep one setting at a time and reduce ensembles to tables
"""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.stats import skew

from microinit.models.experiment import EnsembleResult, ExperimentConfig
from microinit.models.observation import NoiseDistribution, OperatorKind
from microinit.models.optim import OptimizerVariant
from microinit.services.dynamics import build_model, sample_attractor
from microinit.services.ensemble import (
    error_profile,
    horizon_cdf,
    horizon_report,
    model_space_stats,
    run_ensemble,
    summary,
)
from microinit.services.filter import lpma_values, snr_gain
from microinit.services.observation import add_noise, generate_series, get_operator
from microinit.services.optim import default_hyperparameters
from microinit.services.seeding import stage_rng

logger = logging.getLogger(__name__)

Tables = Dict[str, pd.DataFrame]


def _variants(config: ExperimentConfig) -> List[str]:
    return list(config.noise.variants)


def experiment_error_profile(config: ExperimentConfig) -> Tables:
    """Median NSE profiles, horizon CDFs and the summary of one ensemble"""
    ensemble = run_ensemble(config)
    return ensemble_tables(ensemble, _variants(config))


def ensemble_tables(ensemble: EnsembleResult, variants: Sequence[str]) -> Tables:
    tables: Tables = {"summary": summary(ensemble, variants)}
    for variant in variants:
        tables[f"profile_{variant}"] = error_profile(ensemble, variant)
        tables[f"horizon_cdf_{variant}"] = horizon_cdf(horizon_report(ensemble, variant))
    return tables


def _sweep_T(config: ExperimentConfig, T_list: Sequence[int]):
    stats = model_space_stats(config)
    for T in T_list:
        logger.info("ensemble at T=%d", T)
        swept = config.with_updates(observation={"T": int(T)})
        yield T, run_ensemble(swept, stats)


def experiment_horizon_vs_T(config: ExperimentConfig, T_list: Sequence[int]) -> Tables:
    """k_max per T, one column per noise variant"""
    variants = _variants(config)
    rows = []
    for T, ensemble in _sweep_T(config, T_list):
        row = {"T": T}
        for variant in variants:
            row[f"k_max_{variant}"] = horizon_report(ensemble, variant).k_max
            row[f"excluded_{variant}"] = ensemble.excluded_count(variant)
        rows.append(row)
    return {"horizon_vs_T": pd.DataFrame(rows)}


def experiment_nse0_vs_T(config: ExperimentConfig, T_list: Sequence[int]) -> Tables:
    """Mean NSE_0 in model space per T and noise variant"""
    rows = []
    for T, ensemble in _sweep_T(config, T_list):
        for variant in _variants(config):
            nse0 = [r.nse0_mod for r in ensemble.for_variant(variant)]
            rows.append(
                {
                    "T": T,
                    "noise": variant,
                    "mean_nse0_mod": float(np.mean(nse0)) if nse0 else np.nan,
                    "median_nse0_mod": float(np.median(nse0)) if nse0 else np.nan,
                }
            )
    return {"nse0_vs_T": pd.DataFrame(rows)}


def experiment_heatmap(
    config: ExperimentConfig, T_range: Sequence[int], m_range: Sequence[int]
) -> Tables:
    """log10 median NSE_0 in model space on a (T, m) grid, noiseless series only"""
    noiseless = config.with_updates(noise={"variants": ["noiseless"]})
    stats = model_space_stats(noiseless)
    n_x = build_model(config.system).dimension
    rows = []
    for T in T_range:
        for m in m_range:
            logger.info("heatmap cell T=%d m=%d", T, m)
            cell = noiseless.with_updates(observation={"T": int(T), "m": int(m)})
            nse0 = [r.nse0_mod for r in run_ensemble(cell, stats).records]
            median = float(np.median(nse0)) if nse0 else np.nan
            rows.append(
                {
                    "T": int(T),
                    "m": int(m),
                    "log10_median_nse0_mod": float(np.log10(median)) if median > 0 else -np.inf,
                    "above_transition": int(T) * int(m) >= n_x,
                }
            )
    return {"heatmap": pd.DataFrame(rows)}


def experiment_optimizer_comparison(
    config: ExperimentConfig, variants: Optional[Sequence[str]] = None
) -> Tables:
    """Mean NSE_0 in model space per refinement optimizer, SGD always included"""
    chosen = [OptimizerVariant(v) for v in (variants or [v.value for v in OptimizerVariant])]
    if OptimizerVariant.SGD not in chosen:
        chosen.insert(0, OptimizerVariant.SGD)
    stats = model_space_stats(config)
    rows = []
    for variant in chosen:
        spec = default_hyperparameters(variant)
        swept = config.with_updates(pipeline={"optimizer": spec.model_dump(mode="json")})
        ensemble = run_ensemble(swept, stats)
        for noise in _variants(config):
            nse0 = [r.nse0_mod for r in ensemble.for_variant(noise)]
            rows.append(
                {
                    "optimizer": variant.value,
                    "noise": noise,
                    "mean_nse0_mod": float(np.mean(nse0)) if nse0 else np.nan,
                    "excluded": ensemble.excluded_count(noise),
                }
            )
    return {"optimizer_comparison": pd.DataFrame(rows)}


def experiment_filter_noise(
    config: ExperimentConfig,
    q_list: Sequence[int],
    dist: Optional[NoiseDistribution] = None,
) -> Tables:
    """
    Distribution of the filtered noise on one very long series

    Histograms of (filtered - clean) per q share one set of bins, and the
    summary tracks variance and skewness as q grows.
    """
    dist = NoiseDistribution(dist or config.noise.distribution)
    model = build_model(config.system)
    op = get_operator(config.observation.operator)
    master = config.experiment.seed
    start = sample_attractor(model, stage_rng(master, "filter:truth"))
    clean = generate_series(
        model, op, start, config.experiment.filter_study_T, config.observation.m
    )
    noisy = add_noise(
        clean,
        config.noise.ratio,
        dist,
        stage_rng(master, "filter:noise"),
        config.noise.beta_a,
        config.noise.beta_b,
        config.noise.left_skewed,
    )
    residuals = {int(q): lpma_values(noisy.values, int(q)) - clean.values for q in q_list}
    raw_noise = noisy.values - clean.values
    edges = np.histogram_bin_edges(raw_noise, bins=config.experiment.histogram_bins)
    centers = 0.5 * (edges[:-1] + edges[1:])

    tables: Tables = {}
    rows = []
    for q, residual in residuals.items():
        density, _ = np.histogram(residual, bins=edges, density=True)
        tables[f"filter_noise_q{q}"] = pd.DataFrame({"bin_center": centers, "density": density})
        rows.append(
            {
                "q": q,
                "std": float(np.std(residual)),
                "variance": float(np.var(residual)),
                "skewness": float(skew(residual)),
                "r0": snr_gain(clean.values, noisy.values, lpma_values(noisy.values, q)) if q else 1.0,
            }
        )
    tables["filter_noise_summary"] = pd.DataFrame(rows)
    return tables


def experiment_bounding_sweep(config: ExperimentConfig, delta_R_list: Sequence[float]) -> Tables:
    """
    Model-space NSE_0 of the rough and refined states per bound threshold

    The identity column is the rough value itself, the reference line a refined
    point is compared against.
    """
    stats = model_space_stats(config)
    rows = []
    for delta in delta_R_list:
        swept = config.with_updates(pipeline={"bound_threshold": float(delta)})
        ensemble = run_ensemble(swept, stats)
        for record in ensemble.records:
            rows.append(
                {
                    "delta_R": float(delta),
                    "noise": record.variant,
                    "run_id": record.run_id,
                    "nse0_rough": record.rough_nse0_mod,
                    "nse0_refined": record.nse0_mod,
                    "identity": record.rough_nse0_mod,
                }
            )
    return {"bounding_sweep": pd.DataFrame(rows)}


def experiment_operator_comparison(
    config: ExperimentConfig, operators: Optional[Sequence[str]] = None
) -> Tables:
    """Error at t_0 and mirror-state capture rate for each observation operator"""
    chosen = [OperatorKind(o) for o in (operators or [o.value for o in OperatorKind])]
    stats = model_space_stats(config)
    tables: Tables = {}
    rows = []
    for operator in chosen:
        swept = config.with_updates(observation={"operator": operator.value})
        ensemble = run_ensemble(swept, stats)
        for variant in _variants(config):
            records = ensemble.for_variant(variant)
            mirror = [r.mirror_closer for r in records if r.mirror_closer is not None]
            rows.append(
                {
                    "operator": operator.value,
                    "noise": variant,
                    "median_nse0_obs": float(np.median([r.nse0_obs for r in records])) if records else np.nan,
                    "median_nse0_mod": float(np.median([r.nse0_mod for r in records])) if records else np.nan,
                    "k_max": horizon_report(ensemble, variant).k_max if records else np.nan,
                    "mirror_fraction": float(np.mean(mirror)) if mirror else np.nan,
                }
            )
            tables[f"profile_{operator.value}_{variant}"] = error_profile(ensemble, variant)
    tables["operator_comparison"] = pd.DataFrame(rows)
    return tables
