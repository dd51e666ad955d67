"""
Diagnostic studies: optimizer comparison, filtered noise, bound thresholds, operators
"""

import argparse

from microinit.cli.common import (
    add_config_args,
    open_writer,
    parse_floats,
    parse_names,
    parse_range,
    resolve_config,
)
from microinit.services.experiments import (
    experiment_bounding_sweep,
    experiment_filter_noise,
    experiment_operator_comparison,
    experiment_optimizer_comparison,
)


def _finish(args, config, command, tables, headline) -> int:
    writer = open_writer(args, config, command)
    writer.write_tables(tables)
    writer.write_manifest(command, args.argv, config, {"master": config.experiment.seed})
    print(tables[headline].to_string(index=False))
    return 0


def optim_compare(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    variants = parse_names(args.variants) if args.variants else None
    tables = experiment_optimizer_comparison(config, variants)
    return _finish(args, config, "optim-compare", tables, "optimizer_comparison")


def filter_study(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    tables = experiment_filter_noise(config, parse_range(args.q_list), args.distribution)
    return _finish(args, config, "filter-study", tables, "filter_noise_summary")


def bounding_sweep(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    tables = experiment_bounding_sweep(config, parse_floats(args.delta_R))
    writer = open_writer(args, config, "bounding-sweep")
    writer.write_tables(tables)
    writer.write_manifest("bounding-sweep", args.argv, config, {"master": config.experiment.seed})
    frame = tables["bounding_sweep"]
    if not frame.empty:
        print(frame.groupby(["delta_R", "noise"])[["nse0_rough", "nse0_refined"]].median().to_string())
    return 0


def operator_compare(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    operators = parse_names(args.operators) if args.operators else None
    tables = experiment_operator_comparison(config, operators)
    return _finish(args, config, "operator-compare", tables, "operator_comparison")


def register(subparsers) -> None:
    parser = subparsers.add_parser("optim-compare", help="Mean NSE_0 per refinement optimizer")
    add_config_args(parser)
    parser.add_argument("--variants", help="Comma-separated optimizers; all nine by default")
    parser.set_defaults(handler=optim_compare)

    parser = subparsers.add_parser("filter-study", help="Filtered-noise distributions per q")
    add_config_args(parser)
    parser.add_argument("--q-list", dest="q_list", default="0,1,2,4,8,16,50")
    parser.add_argument("--distribution", choices=["gaussian", "beta"], default="beta")
    parser.set_defaults(handler=filter_study)

    parser = subparsers.add_parser("bounding-sweep", help="Rough vs refined NSE_0 per delta_R")
    add_config_args(parser)
    parser.add_argument("--delta-R", dest="delta_R", default="0.5,0.2,0.1,0.05,0.02,0.01")
    parser.set_defaults(handler=bounding_sweep)

    parser = subparsers.add_parser("operator-compare", help="Compare the observation operators")
    add_config_args(parser)
    parser.add_argument("--operators", help="Comma-separated operators; all three by default")
    parser.set_defaults(handler=operator_compare)
