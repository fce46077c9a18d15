"""Scenario configuration: INI-style text with units, validated against a schema.

Grammar: `[section]` headers and `key = value` lines; values are numbers
with an optional unit suffix (`10 GHz`, `1.5 us`, `26 dBW`, `6 dB`,
`10 km`).  Bare numbers are canonical SI (or linear for gains/losses).
Angles are degrees at this surface and radians everywhere inside the
package.  Omitted keys fall back to the reference scenario defaults; all
dB/linear conversion happens here and nowhere else.
"""

from __future__ import annotations

import configparser
import hashlib
import io
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .clutter import ClutterEnvironment
from .detection import DetectionSpec
from .geometry import RisPanel, SceneGeometry, scene_from_ris_angles
from .link_budget import LossLedger, RadarSystem
from .pattern import AngularSector
from .timeline import PRI_LISTENING, PRI_TURNAROUND, DwellPlan, build_dwell_plan
from .waveform import LFM, RECT, PulseWaveform


class ConfigError(ValueError):
    """Configuration problem, annotated with its section.key path."""


_UNIT_SCALES = {
    "length": {"m": 1.0, "km": 1e3, "cm": 1e-2, "mm": 1e-3},
    "time": {"s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9},
    "frequency": {"hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9},
    "power": {"w": 1.0, "kw": 1e3, "mw": 1e6},
    "speed": {"m/s": 1.0, "km/s": 1e3},
}


def _parse_quantity(text: str, kind: str, path: str) -> float:
    parts = text.split()
    try:
        if len(parts) == 1:
            return float(parts[0])
        if len(parts) == 2:
            value = float(parts[0])
            unit = parts[1].lower()
            if kind in ("gain", "loss") and unit == "db":
                return 10.0 ** (value / 10.0)
            if kind == "power" and unit == "dbw":
                return 10.0 ** (value / 10.0)
            if kind == "angle" and unit in ("deg", "degree", "degrees"):
                return value
            if kind == "angle" and unit == "rad":
                return math.degrees(value)
            scale = _UNIT_SCALES.get(kind, {}).get(unit)
            if scale is not None:
                return value * scale
            raise ValueError(f"unit {parts[1]!r} not valid for a {kind} value")
        raise ValueError("expected 'number [unit]'")
    except ValueError as err:
        raise ConfigError(f"{path}: {err}") from None


def _parse_value(text: str, kind, path: str):
    text = text.strip()
    if isinstance(kind, tuple):  # enumerated choice
        if text not in kind:
            raise ConfigError(f"{path}: must be one of {', '.join(kind)}")
        return text
    if kind == "int":
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{path}: expected an integer") from None
    if kind == "bool":
        lowered = text.lower()
        if lowered in ("true", "yes", "1", "on"):
            return True
        if lowered in ("false", "no", "0", "off"):
            return False
        raise ConfigError(f"{path}: expected a boolean")
    if kind == "float":
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{path}: expected a number") from None
    return _parse_quantity(text, kind, path)


# (kind, default in canonical units); angle defaults are degrees
_SCHEMA = {
    "scene": {
        "r1": ("length", 1000.0),
        "radar_theta_deg": ("angle", 30.0),
        "radar_phi_deg": ("angle", 20.0),
        "r2": ("length", 1500.0),
        "target_theta_deg": ("angle", 0.0),
        "target_phi_deg": ("angle", 0.0),
        "rcs": ("float", 0.02),
        "radial_velocity": ("speed", 0.0),
    },
    "panel": {
        "n": ("int", 101),
        "m": ("int", 101),
        "pitch_factor": ("float", 0.5),
        "efficiency": ("float", 0.8),
        "gain": ("gain", 10.0 ** 0.4),
        "exponent": ("float", 1.5),
        "pointing1_theta_deg": ("angle", 30.0),
        "pointing1_phi_deg": ("angle", 20.0),
        "pointing2_theta_deg": ("angle", 0.0),
        "pointing2_phi_deg": ("angle", 0.0),
    },
    "radar": {
        "peak_power": ("power", 10.0 ** 2.6),
        "tx_gain": ("gain", 10.0 ** 3.8),
        "f0": ("frequency", 10e9),
        "bandwidth": ("frequency", 10e6),
        "tau": ("time", 1.5e-6),
        "noise_figure": ("gain", 10.0 ** 0.25),
        "pattern_gain": ("gain", 1.0),
    },
    "losses": {
        "transmit": ("loss", 10.0 ** 0.6),
        "atmospheric1": ("loss", 1.0),
        "atmospheric2": ("loss", 1.0),
        "receive": ("loss", 1.0),
        "processing": ("loss", 1.0),
        "panel": ("loss", 1.0),
    },
    "clutter": {
        "surface_reflectivity": ("float", 0.01),
        "volume_reflectivity": ("float", 1e-8),
        "grazing_deg": ("angle", 0.0),
    },
    "detection": {
        "pfa": ("float", 1e-4),
        "model": (("sw0", "sw1"), "sw0"),
        "target_pd": ("float", 0.9),
    },
    "timeline": {
        "unambiguous_range": ("length", 10000.0),
        "n_pulses": ("int", 64),
        "pri_convention": ((PRI_LISTENING, PRI_TURNAROUND), PRI_LISTENING),
        "sector_theta_min_deg": ("angle", 0.0),
        "sector_theta_max_deg": ("angle", 30.0),
        "sector_phi_min_deg": ("angle", -15.0),
        "sector_phi_max_deg": ("angle", 15.0),
        "max_edge_loss_db": ("float", 3.0),
    },
    "simulation": {
        "seed": ("int", 12345),
        "sample_rate": ("frequency", 20e6),
        "waveform": ((LFM, RECT), LFM),
        "r2_min": ("length", 0.0),
        "parallel": ("bool", False),
        "noise": ("bool", True),
        "clutter_enabled": ("bool", False),
        "clutter_scatterers": ("int", 32),
    },
    "sweep": {
        "variable": (("r2", "n_pulses", "n"), "r2"),
        "start": ("float", 500.0),
        "stop": ("float", 3000.0),
        "step": ("float", 50.0),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario values plus builders for the domain objects."""

    values: Dict[Tuple[str, str], object] = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[(section, key)]

    # -- builders ---------------------------------------------------------

    def build_radar(self) -> RadarSystem:
        pattern_gain = float(self.get("radar", "pattern_gain"))
        evaluator = None if pattern_gain == 1.0 else (lambda th, ph: pattern_gain)
        return RadarSystem(
            peak_power=self.get("radar", "peak_power"),
            tx_gain=self.get("radar", "tx_gain"),
            f0=self.get("radar", "f0"),
            bandwidth=self.get("radar", "bandwidth"),
            tau=self.get("radar", "tau"),
            noise_figure=self.get("radar", "noise_figure"),
            radar_pattern=evaluator,
        )

    def build_panel(self) -> RisPanel:
        lambda0 = self.build_radar().lambda0
        pitch = self.get("panel", "pitch_factor") * lambda0
        return RisPanel(
            n=self.get("panel", "n"),
            m=self.get("panel", "m"),
            dx=pitch,
            dy=pitch,
            eta=self.get("panel", "efficiency"),
            gain=self.get("panel", "gain"),
            patch_exponent=self.get("panel", "exponent"),
        )

    def build_scene(self) -> SceneGeometry:
        return scene_from_ris_angles(
            r1=self.get("scene", "r1"),
            radar_theta=math.radians(self.get("scene", "radar_theta_deg")),
            radar_phi=math.radians(self.get("scene", "radar_phi_deg")),
            r2=self.get("scene", "r2"),
            target_theta=math.radians(self.get("scene", "target_theta_deg")),
            target_phi=math.radians(self.get("scene", "target_phi_deg")),
        )

    def build_ledger(self) -> LossLedger:
        return LossLedger(
            l_t=self.get("losses", "transmit"),
            l_atm1=self.get("losses", "atmospheric1"),
            l_atm2=self.get("losses", "atmospheric2"),
            l_r=self.get("losses", "receive"),
            l_sp=self.get("losses", "processing"),
            l_ris=self.get("losses", "panel"),
        )

    def build_clutter_env(self) -> ClutterEnvironment:
        return ClutterEnvironment(
            surface_reflectivity=self.get("clutter", "surface_reflectivity"),
            volume_reflectivity=self.get("clutter", "volume_reflectivity"),
            grazing_angle=math.radians(self.get("clutter", "grazing_deg")),
        )

    def build_detection_spec(self) -> DetectionSpec:
        return DetectionSpec(pfa=self.get("detection", "pfa"),
                             model=self.get("detection", "model"))

    def build_dwell_plan(self) -> DwellPlan:
        return build_dwell_plan(
            tau=self.get("radar", "tau"),
            r1=self.get("scene", "r1"),
            r_ua=self.get("timeline", "unambiguous_range"),
            n_pulses=self.get("timeline", "n_pulses"),
            convention=self.get("timeline", "pri_convention"),
        )

    def build_waveform(self) -> PulseWaveform:
        kind = self.get("simulation", "waveform")
        bandwidth = self.get("radar", "bandwidth")
        tau = self.get("radar", "tau")
        if kind == RECT:
            bandwidth = 1.0 / tau
        return PulseWaveform(kind=kind, tau=tau, bandwidth=bandwidth,
                             sample_rate=self.get("simulation", "sample_rate"))

    def build_sector(self) -> AngularSector:
        return AngularSector(
            theta_min=math.radians(self.get("timeline", "sector_theta_min_deg")),
            theta_max=math.radians(self.get("timeline", "sector_theta_max_deg")),
            phi_min=math.radians(self.get("timeline", "sector_phi_min_deg")),
            phi_max=math.radians(self.get("timeline", "sector_phi_max_deg")),
        )

    def pointing1(self) -> Tuple[float, float]:
        return (math.radians(self.get("panel", "pointing1_theta_deg")),
                math.radians(self.get("panel", "pointing1_phi_deg")))

    def pointing2(self) -> Tuple[float, float]:
        return (math.radians(self.get("panel", "pointing2_theta_deg")),
                math.radians(self.get("panel", "pointing2_phi_deg")))

    def target_velocity(self) -> np.ndarray:
        """Velocity vector realizing the configured radial speed (toward panel)."""
        scene = self.build_scene()
        toward_ris = (scene.ris_position - scene.target_position) / scene.r2
        return self.get("scene", "radial_velocity") * toward_ris

    # -- serialization ----------------------------------------------------

    def emit(self) -> str:
        """Canonical text form; parse(emit(c)) reproduces c exactly."""
        lines = ["# risradar scenario (canonical SI / linear units; angles in degrees)"]
        for section in _SCHEMA:
            lines.append(f"\n[{section}]")
            for key in _SCHEMA[section]:
                value = self.values[(section, key)]
                if isinstance(value, bool):
                    text = "true" if value else "false"
                else:
                    text = repr(value) if isinstance(value, float) else str(value)
                lines.append(f"{key} = {text}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.emit().encode()).hexdigest()


def _validate(config: ScenarioConfig) -> None:
    """Run the structural checks that need cross-key context."""
    try:
        config.build_radar()
        config.build_panel()
        config.build_ledger()
        config.build_clutter_env()
        config.build_detection_spec()
        config.build_waveform()
        config.build_sector()
    except ConfigError:
        raise
    except ValueError as err:
        raise ConfigError(str(err)) from None
    pfa = config.get("detection", "pfa")
    if not 0.0 < pfa < 1.0:
        raise ConfigError(f"detection.pfa: must lie in (0, 1), got {pfa}")
    if config.get("sweep", "step") <= 0:
        raise ConfigError("sweep.step: must be positive")
    for key in ("r1", "r2"):
        if config.get("scene", key) <= 0:
            raise ConfigError(f"scene.{key}: must be positive")


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate scenario text; omitted keys take the defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigError(f"malformed config: {err}") from None

    values: Dict[Tuple[str, str], object] = {
        (section, key): default
        for section, keys in _SCHEMA.items()
        for key, (_, default) in keys.items()
    }
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
            kind, _ = _SCHEMA[section][key]
            values[(section, key)] = _parse_value(raw, kind, f"{section}.{key}")

    config = ScenarioConfig(values=values)
    _validate(config)
    return config


def load_config(path) -> ScenarioConfig:
    with io.open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def default_config() -> ScenarioConfig:
    return parse_config("")
