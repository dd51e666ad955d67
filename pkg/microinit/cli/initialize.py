"""
initialize command: infer the microstate behind one series
"""

import argparse

import pandas as pd

from microinit.cli.common import add_config_args, open_writer, resolve_config
from microinit.exceptions import ConfigError, InvalidSeriesError
from microinit.models.observation import ObservationSeries
from microinit.services.dynamics import build_model
from microinit.services.ensemble import model_space_stats, run_single
from microinit.services.observation import get_operator
from microinit.services.pipeline import initialize as run_pipeline


def read_series(path, m: int, dt: float, noise_ratio: float) -> ObservationSeries:
    """Series CSV with a y_k column ordered from k = -T to 0"""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as exc:
        raise ConfigError(f"cannot read series file: {exc}", path=str(path)) from None
    if "y_k" not in frame.columns:
        raise InvalidSeriesError("series file needs a y_k column", path=str(path))
    if "k" in frame.columns:
        frame = frame.sort_values("k")
    return ObservationSeries(
        values=frame["y_k"].to_numpy(dtype=float), m=m, dt=dt, noise_ratio=noise_ratio
    )


def initialize(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    if args.noise_ratio is not None:
        config = config.with_updates(pipeline={"noise_ratio": args.noise_ratio})
    model = build_model(config.system)
    writer = open_writer(args, config, "initialize")

    if args.series is not None:
        raw = read_series(
            args.series, config.observation.m, model.dt, config.pipeline.noise_ratio or 0.0
        )
        pipeline = config.pipeline.model_copy(update={"seed": config.experiment.seed})
        result = run_pipeline(model, get_operator(config.observation.operator), raw, pipeline)
        writer.write_json("initialization", result)
        flags = result.flags
        print(f"✅ assimilated state found (bounded={flags.bounded}, refined={flags.refined})")
    else:
        records, excluded = run_single(args.run_id, config, model_space_stats(config))
        for record in records:
            writer.write_json(f"initialization_{record.variant}", record)
            print(
                f"✅ {record.variant}: J={record.result.cost_assimilated}, "
                f"NSE_0 model={record.nse0_mod:.3e}, horizon={record.horizon}"
            )
        for failure in excluded:
            writer.write_json(f"failure_{failure.variant}", failure)
            print(f"⚠️  {failure.variant} run failed: {failure.detail}")
    writer.write_manifest(
        "initialize", args.argv, config, {"master": config.experiment.seed, "run_id": args.run_id}
    )
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("initialize", help="Run the initialization pipeline once")
    add_config_args(parser)
    parser.add_argument("--series", help="CSV with columns k, t_k, y_k; synthetic when omitted")
    parser.add_argument("--noise-ratio", type=float, help="Known sigma_n / sigma_y of the series")
    parser.add_argument("--run-id", type=int, default=0, help="Synthetic run to reproduce")
    parser.set_defaults(handler=initialize)
