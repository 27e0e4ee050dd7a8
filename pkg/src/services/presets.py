"""Named study configurations loaded from the JSON preset pack."""

import copy
import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..models.schemas import ExperimentReport
from .errors import ConfigError
from .experiments import run_study

logger = logging.getLogger(__name__)

_PRESET_PACK = Path(__file__).resolve().parents[2] / "presets" / "acceptance.json"


@lru_cache(maxsize=4)
def _load_pack(path: str) -> Dict[str, Dict[str, Any]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    presets = data.get("presets")
    if not isinstance(presets, dict):
        raise ConfigError(f"{path}: preset pack needs a 'presets' object")
    logger.debug(f"loaded {len(presets)} presets from {path}")
    return presets


def list_presets(pack: Optional[Path] = None) -> List[Dict[str, Any]]:
    """Name, study kind and description of every preset."""
    presets = _load_pack(str(pack or _PRESET_PACK))
    return [
        {"name": name, "study": row["config"]["study"], "description": row.get("description", "")}
        for name, row in presets.items()
    ]


def get_preset(name: str, pack: Optional[Path] = None) -> Dict[str, Any]:
    """A fresh copy of the named preset's study config."""
    presets = _load_pack(str(pack or _PRESET_PACK))
    if name not in presets:
        raise ConfigError(f"unknown preset '{name}', expected one of {sorted(presets)}")
    return copy.deepcopy(presets[name]["config"])


def run_preset(name: str, replications: Optional[int] = None, seed: Optional[int] = None) -> ExperimentReport:
    """Run a preset inline, optionally overriding replications and seed."""
    config = get_preset(name)
    if replications is not None:
        config["replications"] = replications
    if seed is not None:
        config["seed"] = seed
    return run_study(config)
