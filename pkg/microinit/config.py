"""
Configuration
Environment settings plus the strict sectioned experiment config format
"""

import configparser
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from microinit.exceptions import ConfigError
from microinit.models.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

SECTIONS = ("system", "observation", "noise", "pipeline", "optimizer", "experiment")

# Per-system defaults applied before the file's own values
PRESETS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "lorenz": {
        "system": {"kind": "lorenz"},
        "observation": {"T": 50, "m": 2},
        "pipeline": {"alpha_r": 1e-4, "beta_r": 0.8, "q": 4, "r0": 2.02},
        "experiment": {"prediction_window": 600},
    },
    "mackey_glass": {
        "system": {"kind": "mackey_glass"},
        "observation": {"T": 25, "m": 2},
        "pipeline": {"alpha_r": 1e-5, "beta_r": 0.2, "q": 5, "r0": 2.41},
        "experiment": {"prediction_window": 900},
    },
}


class Settings(BaseSettings):
    """Process environment; only the output location and log level live here"""

    model_config = SettingsConfigDict(env_prefix="MICROINIT_", env_file=".env", extra="ignore")

    output_dir: Path = Path("outputs")
    log_level: str = "WARNING"


@lru_cache
def get_settings() -> Settings:
    return Settings()


def _decode(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def preset(system: str) -> Dict[str, Dict[str, Any]]:
    try:
        return json.loads(json.dumps(PRESETS[system]))
    except KeyError:
        raise ConfigError(f"unknown system '{system}'", known=sorted(PRESETS)) from None


def build_config(sections: Dict[str, Dict[str, Any]]) -> ExperimentConfig:
    """Preset for the chosen system, overridden by the given section values"""
    sections = {name: dict(values) for name, values in sections.items()}
    unknown = set(sections) - set(SECTIONS)
    if unknown:
        raise ConfigError("unknown config sections", sections=sorted(unknown))
    kind = sections.get("system", {}).get("kind", "lorenz")
    data = _merge(preset(kind), {k: v for k, v in sections.items() if k != "optimizer"})
    if "optimizer" in sections:
        pipeline = data.setdefault("pipeline", {})
        pipeline["optimizer"] = _merge(pipeline.get("optimizer", {}), sections["optimizer"])
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    sections = {
        name: {key: _decode(value) for key, value in parser.items(name)}
        for name in parser.sections()
    }
    return build_config(sections)


def load_config(path: Optional[Path] = None, system: Optional[str] = None) -> ExperimentConfig:
    """
    Read a config file, or the preset for system when no file is given

    A system given alongside a file must agree with the file's [system] kind.
    """
    if path is None:
        return build_config({"system": {"kind": system or "lorenz"}})
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config file not found", path=str(path))
    config = parse_config_text(path.read_text(encoding="utf-8"))
    if system is not None and config.system.kind != system:
        raise ConfigError(
            "config file describes a different system", file=config.system.kind, requested=system
        )
    logger.info("loaded %s config from %s", config.system.kind, path)
    return config


def dump_config_text(config: ExperimentConfig) -> str:
    data = config.model_dump(mode="json")
    data["optimizer"] = data["pipeline"].pop("optimizer")
    lines = []
    for section in SECTIONS:
        lines.append(f"[{section}]")
        lines.extend(f"{key} = {json.dumps(value)}" for key, value in data[section].items())
        lines.append("")
    return "\n".join(lines)


def save_config(config: ExperimentConfig, path: Path) -> Path:
    path = Path(path)
    path.write_text(dump_config_text(config), encoding="utf-8")
    return path
