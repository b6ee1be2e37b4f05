"""Shipped scenario presets, stored as config files under experiments/configs/."""

from pathlib import Path
from typing import Dict, List

from core.errors import ValidationError
from experiments.config_parser import load_config
from experiments.scenario import ScenarioSpec

PRESET_DIR = Path(__file__).resolve().parent / "configs"


def preset_path(name: str) -> Path:
    path = PRESET_DIR / f"{name}.conf"
    if not path.is_file():
        raise ValidationError(f"unknown preset {name!r}; available: {', '.join(list_presets())}",
                              invariant="preset exists")
    return path


def list_presets() -> List[str]:
    return sorted(path.stem for path in PRESET_DIR.glob("*.conf"))


def load_preset(name: str) -> ScenarioSpec:
    return load_config(preset_path(name))


def preset_summaries() -> Dict[str, str]:
    """First comment line of every preset file"""
    summaries = {}
    for name in list_presets():
        first = preset_path(name).read_text(encoding="utf-8").splitlines()[0]
        summaries[name] = first.lstrip("#").strip() if first.startswith("#") else ""
    return summaries
