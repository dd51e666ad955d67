"""
Output Service
Writes CSV tables, JSON records and the per-invocation manifest
"""

import hashlib
import json
import logging
import platform
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import pydantic
import scipy

from microinit import __version__
from microinit.exceptions import ConfigError
from microinit.models.experiment import ExperimentConfig

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"

# execution settings that never change a result
UNHASHED_EXPERIMENT_KEYS = {"workers", "output_dir"}


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def config_hash(config: ExperimentConfig) -> str:
    """sha256 of the settings that determine the results"""
    settings = config.model_dump(mode="json")
    settings["experiment"] = {
        key: value
        for key, value in settings["experiment"].items()
        if key not in UNHASHED_EXPERIMENT_KEYS
    }
    canonical = json.dumps(settings, sort_keys=True)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def library_versions() -> Dict[str, str]:
    return {
        "microinit": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
        "pydantic": pydantic.VERSION,
    }


class OutputWriter:
    """
    Collects every file written by one command

    No timestamps go into any file, so reruns with the same inputs are
    byte-identical.
    """

    def __init__(self, output_dir: Path):
        self.output_dir = Path(output_dir)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory: {exc}", path=str(output_dir))
        self.files: List[str] = []

    def _track(self, path: Path) -> Path:
        name = path.relative_to(self.output_dir).as_posix()
        if name not in self.files:
            self.files.append(name)
        logger.info("wrote %s", path)
        return path

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.output_dir / f"{name}.csv"
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        return self._track(path)

    def write_tables(self, tables: Dict[str, pd.DataFrame]) -> List[Path]:
        return [self.write_csv(name, frame) for name, frame in tables.items()]

    def write_json(self, name: str, payload: Any) -> Path:
        path = self.output_dir / f"{name}.json"
        if isinstance(payload, pydantic.BaseModel):
            text = payload.model_dump_json(indent=2)
        else:
            text = json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
        path.write_text(text + "\n", encoding="utf-8")
        return self._track(path)

    def write_manifest(
        self,
        command: str,
        argv: List[str],
        config: Optional[ExperimentConfig],
        seeds: Optional[Dict[str, Any]] = None,
    ) -> Path:
        manifest = {
            "command": command,
            "argv": argv,
            "config": config.model_dump(mode="json") if config is not None else None,
            "config_hash": config_hash(config) if config is not None else None,
            "versions": library_versions(),
            "seeds": seeds or {},
            "outputs": {name: _sha256(self.output_dir / name) for name in sorted(self.files)},
        }
        path = self.output_dir / MANIFEST_NAME
        path.write_text(
            json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n",
            encoding="utf-8",
        )
        logger.info("manifest written to %s", path)
        return path


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, pydantic.BaseModel):
        return value.model_dump(mode="json")
    raise TypeError(f"cannot serialize {type(value).__name__}")
