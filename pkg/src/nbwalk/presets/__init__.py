"""Bundled walk configurations (angles in units of pi, gamma = 0.2746 unless noted).

=====================  =============================================================
name                   use
=====================  =============================================================
wall-cut-a             domain wall 30 + 30, theta2_L = 0.75; scan theta2_R around 0.45
wall-cut-b             domain wall 30 + 30, theta2_L = -0.9735; scan theta2_R around -0.45
skin-wall              skin-effect wall 40 + 40, theta2_L = -0.9375, theta2_R = -0.44
wall-start-a           wall-cut-a sized for a seven-step walk from x = 0
wall-start-b           wall-cut-b sized for a seven-step walk from x = 0
bulk-start             seven-step walk from x0 = 6, theta1_R = 0.5625
bulk-start-flat        seven-step walk from x0 = 6, theta1_R = -0.5 (flat dispersion)
long-run               wall-cut-a sized for 150 steps from x0 = 0 or x0 = 150
weak-loss-wall-start   gamma = 0.1373, seven steps from x = 0
weak-loss-bulk-start   gamma = 0.1373, seven steps from x0 = 6, theta1_R = -0.4688
=====================  =============================================================
"""

from __future__ import annotations

import json
from importlib import resources

from ..errors import ConfigError
from ..model import WalkConfig

__all__ = ["available_presets", "load_preset", "preset_record"]


def available_presets() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def preset_record(name: str) -> dict:
    path = resources.files(__name__) / f"{name}.json"
    if not path.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(available_presets())}")
    return json.loads(path.read_text(encoding="utf-8"))


def load_preset(name: str) -> WalkConfig:
    return WalkConfig.from_dict(preset_record(name))
