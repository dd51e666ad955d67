"""
ensemble / horizon / nse0 / heatmap commands
"""

import argparse

from microinit.cli.common import add_config_args, open_writer, parse_range, resolve_config
from microinit.services.ensemble import run_ensemble
from microinit.services.experiments import (
    ensemble_tables,
    experiment_heatmap,
    experiment_horizon_vs_T,
    experiment_nse0_vs_T,
)


def _seeds(config):
    return {"master": config.experiment.seed, "ensemble_size": config.experiment.ensemble_size}


def ensemble(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    result = run_ensemble(config)
    writer = open_writer(args, config, "ensemble")
    tables = ensemble_tables(result, config.noise.variants)
    writer.write_tables(tables)
    writer.write_json("runs", result)
    writer.write_manifest("ensemble", args.argv, config, _seeds(config))
    print(tables["summary"].to_string(index=False))
    return 0


def horizon(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    tables = experiment_horizon_vs_T(config, parse_range(args.T_list))
    writer = open_writer(args, config, "horizon")
    writer.write_tables(tables)
    writer.write_manifest("horizon", args.argv, config, _seeds(config))
    print(tables["horizon_vs_T"].to_string(index=False))
    return 0


def nse0(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    tables = experiment_nse0_vs_T(config, parse_range(args.T_list))
    writer = open_writer(args, config, "nse0")
    writer.write_tables(tables)
    writer.write_manifest("nse0", args.argv, config, _seeds(config))
    print(tables["nse0_vs_T"].to_string(index=False))
    return 0


def heatmap(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    T_range, m_range = parse_range(args.T_range), parse_range(args.m_range)
    tables = experiment_heatmap(config, T_range, m_range)
    writer = open_writer(args, config, "heatmap")
    writer.write_tables(tables)
    writer.write_manifest("heatmap", args.argv, config, _seeds(config))
    print(f"✅ {len(T_range)}x{len(m_range)} grid written to {writer.output_dir}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("ensemble", help="Error profiles and horizon of one ensemble")
    add_config_args(parser)
    parser.set_defaults(handler=ensemble)

    parser = subparsers.add_parser("horizon", help="k_max as a function of T")
    add_config_args(parser)
    parser.add_argument("--T-list", dest="T_list", default="5:50:5", help="e.g. 5:50:5")
    parser.set_defaults(handler=horizon)

    parser = subparsers.add_parser("nse0", help="Mean model-space NSE_0 as a function of T")
    add_config_args(parser)
    parser.add_argument("--T-list", dest="T_list", default="5:50:5")
    parser.set_defaults(handler=nse0)

    parser = subparsers.add_parser("heatmap", help="Noiseless NSE_0 over a (T, m) grid")
    add_config_args(parser, shape=False)
    parser.add_argument("--T", dest="T_range", default="5:50:5", help="Range of T, e.g. 5:50:5")
    parser.add_argument("--m", dest="m_range", default="1:5", help="Range of m, e.g. 1:5")
    parser.set_defaults(handler=heatmap)
