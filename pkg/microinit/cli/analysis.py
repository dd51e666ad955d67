"""
spectrum / lyapunov / linear-study commands
"""

import argparse

import pandas as pd

from microinit.cli.common import add_config_args, open_writer, parse_range, resolve_config
from microinit.services.dynamics import build_model
from microinit.services.linear import transition_study
from microinit.services.observation import get_operator
from microinit.services.seeding import stage_rng
from microinit.services.validation import lyapunov_exponent, power_spectrum, ten_fold_time


def spectrum(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    model = build_model(config.system)
    op = get_operator(config.observation.operator) if args.observable else None
    result = power_spectrum(
        model,
        stage_rng(config.experiment.seed, "spectrum"),
        op=op,
        n_runs=args.n_runs or config.experiment.spectrum_runs,
        n_points=args.n_points or config.experiment.spectrum_points,
        component=args.component,
    )
    frame = pd.DataFrame(
        {"frequency": result.frequency, "power": result.power, "density": result.density}
    )
    writer = open_writer(args, config, "spectrum")
    writer.write_csv("spectrum", frame)
    writer.write_manifest("spectrum", args.argv, config, {"master": config.experiment.seed})
    print(f"✅ spectrum with {frame.shape[0]} bins written to {writer.output_dir}")
    return 0


def lyapunov(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    model = build_model(config.system)
    lam = lyapunov_exponent(
        model,
        stage_rng(config.experiment.seed, "lyapunov"),
        renorm_interval=config.experiment.renorm_interval,
        total_steps=config.experiment.lyapunov_steps,
    )
    m = config.observation.m
    report = {
        "system": config.system.kind,
        "lyapunov_exponent": lam,
        "m": m,
        "dt": model.dt,
        "ten_fold_time": ten_fold_time(lam, m, model.dt),
    }
    writer = open_writer(args, config, "lyapunov")
    writer.write_json("lyapunov", report)
    writer.write_manifest("lyapunov", args.argv, config, {"master": config.experiment.seed})
    print(f"🎯 lambda = {lam:.4f} per unit time, t_lambda = {report['ten_fold_time']:.1f} samples")
    return 0


def linear_study(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    frame = transition_study(
        n_x=args.n_x,
        m_range=parse_range(args.m_range),
        T_range=parse_range(args.T_range),
        draws=args.draws,
        seed=config.experiment.seed,
        extended=not args.reduced,
        workers=config.experiment.workers,
    )
    writer = open_writer(args, config, "linear-study")
    writer.write_csv("linear_study", frame)
    writer.write_manifest("linear-study", args.argv, config, {"master": config.experiment.seed})
    print(frame.to_string(index=False))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("spectrum", help="Ensemble-averaged power spectrum")
    add_config_args(parser)
    parser.add_argument("--n-runs", type=int, help="Trajectories to average")
    parser.add_argument("--n-points", type=int, help="Points per trajectory, a power of two")
    parser.add_argument("--component", type=int, default=0, help="State component to track")
    parser.add_argument("--observable", action="store_true", help="Track H(x) instead")
    parser.set_defaults(handler=spectrum)

    parser = subparsers.add_parser("lyapunov", help="Largest Lyapunov exponent and t_lambda")
    add_config_args(parser)
    parser.set_defaults(handler=lyapunov)

    parser = subparsers.add_parser("linear-study", help="Exact recovery on random linear systems")
    add_config_args(parser, shape=False)
    parser.add_argument("--n-x", dest="n_x", type=int, default=8)
    parser.add_argument("--T", dest="T_range", default="1:8")
    parser.add_argument("--m", dest="m_range", default="1:4")
    parser.add_argument("--draws", type=int, default=20)
    parser.add_argument("--reduced", action="store_true", help="Use only the sampled rows")
    parser.set_defaults(handler=linear_study)
