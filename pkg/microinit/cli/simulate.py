"""
simulate / observe commands: raw trajectories and synthetic observation series
"""

import argparse

import numpy as np
import pandas as pd

from microinit.cli.common import add_config_args, open_writer, resolve_config
from microinit.models.observation import ObservationSeries
from microinit.services.dynamics import build_model, sample_attractor, trajectory
from microinit.services.observation import add_noise, generate_series, get_operator
from microinit.services.seeding import stage_rng


def series_frame(series: ObservationSeries) -> pd.DataFrame:
    return pd.DataFrame(
        {"k": np.arange(-series.T, 1), "t_k": series.times, "y_k": series.values}
    )


def simulate(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    model = build_model(config.system)
    seed = config.experiment.seed
    start = sample_attractor(model, stage_rng(seed, "simulate"))
    states = trajectory(model, start, args.steps, args.stride)
    frame = pd.DataFrame(states, columns=[f"x{i}" for i in range(model.dimension)])
    frame.insert(0, "t", np.arange(args.steps) * args.stride * model.dt)
    frame.insert(0, "step", np.arange(args.steps) * args.stride)

    writer = open_writer(args, config, "simulate")
    writer.write_csv("trajectory", frame)
    writer.write_manifest("simulate", args.argv, config, {"master": seed})
    print(f"✅ {args.steps} states of {config.system.kind} written to {writer.output_dir}")
    return 0


def observe(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    model = build_model(config.system)
    op = get_operator(config.observation.operator)
    seed = config.experiment.seed
    start = sample_attractor(model, stage_rng(seed, "truth", 0))
    clean = generate_series(model, op, start, config.observation.T, config.observation.m)

    writer = open_writer(args, config, "observe")
    writer.write_json("truth", {"truth_start": start})
    writer.write_csv("series_noiseless", series_frame(clean))
    if "noisy" in config.noise.variants:
        noise = config.noise
        noisy = add_noise(
            clean, noise.ratio, noise.distribution, stage_rng(seed, "noise", 0),
            noise.beta_a, noise.beta_b, noise.left_skewed,
        )
        writer.write_csv("series_noisy", series_frame(noisy))
    writer.write_manifest("observe", args.argv, config, {"master": seed})
    print(f"✅ series of T={clean.T} written to {writer.output_dir}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("simulate", help="Write an attractor trajectory")
    add_config_args(parser)
    parser.add_argument("--steps", type=int, default=15000, help="States to write")
    parser.add_argument("--stride", type=int, default=1, help="Model steps between states")
    parser.set_defaults(handler=simulate)

    parser = subparsers.add_parser("observe", help="Write noiseless and noisy series")
    add_config_args(parser)
    parser.set_defaults(handler=observe)
