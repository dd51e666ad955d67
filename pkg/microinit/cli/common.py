"""
Shared CLI plumbing: config flags, range parsing and output handling
"""

import argparse
from pathlib import Path
from typing import List, Optional

from microinit.config import get_settings, load_config
from microinit.exceptions import ConfigError
from microinit.models.experiment import ExperimentConfig
from microinit.services.output import OutputWriter


def add_config_args(parser: argparse.ArgumentParser, shape: bool = True) -> None:
    parser.add_argument("--config", type=Path, help="Experiment config file")
    parser.add_argument(
        "--system", choices=["lorenz", "mackey_glass"], help="Preset used when no file is given"
    )
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--runs", type=int, help="Ensemble size")
    parser.add_argument("--workers", type=int, help="Worker processes")
    parser.add_argument("--output-dir", type=Path, help="Where outputs and the manifest go")
    parser.add_argument("--operator", help="cube_sum, product or pairwise_sum")
    parser.add_argument("--optimizer", help="Refinement optimizer variant")
    parser.add_argument("--window", type=int, help="Prediction window in samples")
    if shape:
        parser.add_argument("--T", type=int, dest="T", help="Observations before the present")
        parser.add_argument("--m", type=int, dest="m", help="Sampling interval in model steps")


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or preset), then flag overrides"""
    config = load_config(args.config, args.system)
    experiment, observation, pipeline = {}, {}, {}
    if args.seed is not None:
        experiment["seed"] = args.seed
    if args.runs is not None:
        experiment["ensemble_size"] = args.runs
    if args.workers is not None:
        experiment["workers"] = args.workers
    if args.window is not None:
        experiment["prediction_window"] = args.window
    if args.operator is not None:
        observation["operator"] = args.operator
    if getattr(args, "T", None) is not None:
        observation["T"] = args.T
    if getattr(args, "m", None) is not None:
        observation["m"] = args.m
    if args.optimizer is not None:
        pipeline["optimizer"] = {"variant": args.optimizer, "hyperparameters": {}}
    updates = {
        name: values
        for name, values in (
            ("experiment", experiment),
            ("observation", observation),
            ("pipeline", pipeline),
        )
        if values
    }
    if not updates:
        return config
    try:
        return config.with_updates(**updates)
    except ValueError as exc:
        raise ConfigError(f"invalid flag override: {exc}") from None


def output_dir(args: argparse.Namespace, config: Optional[ExperimentConfig], command: str) -> Path:
    if getattr(args, "output_dir", None) is not None:
        return args.output_dir
    if config is not None and config.experiment.output_dir:
        return Path(config.experiment.output_dir)
    return get_settings().output_dir / command


def open_writer(args: argparse.Namespace, config: Optional[ExperimentConfig], command: str) -> OutputWriter:
    return OutputWriter(output_dir(args, config, command))


def parse_range(text: str) -> List[int]:
    """
    Integer list from "a:b[:step]" (inclusive), "a,b,c" or a single value
    """
    text = text.strip()
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError(text)
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step < 1 or stop < start:
                raise ValueError(text)
            return list(range(start, stop + 1, step))
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"invalid integer range '{text}'") from None
    if not values:
        raise ConfigError("empty range")
    return values


def parse_floats(text: str) -> List[float]:
    try:
        values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"invalid number list '{text}'") from None
    if not values:
        raise ConfigError("empty number list")
    return values


def parse_names(text: str) -> List[str]:
    return [p.strip() for p in text.split(",") if p.strip()]
