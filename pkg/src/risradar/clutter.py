"""Illuminated clutter geometry and signal-to-clutter ratios.

The SCR closed forms use the small-angle beam footprints exactly as they
enter the sizing analysis; the exact-tangent areas are available for audit
but never silently substituted.  Zero reflectivity yields an infinite SCR
rather than an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import SPEED_OF_LIGHT
from .geometry import RisPanel, SceneGeometry
from .link_budget import RadarSystem, received_power

PULSE_LENGTH_LIMITED = "pulse-length-limited"
BEAMWIDTH_LIMITED = "beamwidth-limited"


@dataclass(frozen=True)
class ClutterEnvironment:
    """Surface/volume reflectivity and grazing geometry of the clutter patch."""

    surface_reflectivity: float = 0.0   # sigma0, m^2/m^2
    volume_reflectivity: float = 0.0    # gamma0, m^2/m^3
    grazing_angle: float = 0.0          # psi, radians

    def __post_init__(self):
        if self.surface_reflectivity < 0 or self.volume_reflectivity < 0:
            raise ValueError("reflectivities must be non-negative")
        if not 0.0 <= self.grazing_angle < math.pi / 2:
            raise ValueError("grazing angle must lie in [0, pi/2)")


def _check_positive(**values):
    for name, value in values.items():
        if value <= 0:
            raise ValueError(f"{name} must be positive")


def illuminated_area_pulse_limited(r2: float, tau: float, phi_bar: float,
                                   grazing: float, exact: bool = False) -> float:
    """Ground patch lit by one range cell of the panel beam (m^2)."""
    _check_positive(r2=r2, tau=tau, phi_bar=phi_bar)
    if not 0.0 <= grazing < math.pi / 2:
        raise ValueError("grazing angle must lie in [0, pi/2)")
    cell = SPEED_OF_LIGHT * tau / 2.0
    if exact:
        return 2.0 * r2 * cell * math.tan(phi_bar / 2.0) / math.cos(grazing)
    return r2 * cell * phi_bar / math.cos(grazing)


def illuminated_area_beam_limited(r2: float, phi_bar: float,
                                  exact: bool = False) -> float:
    """Footprint of a circular beam of width phi_bar at range r2 (m^2)."""
    _check_positive(r2=r2, phi_bar=phi_bar)
    if exact:
        return math.pi * r2 ** 2 * math.tan(phi_bar / 2.0) ** 2
    return math.pi * r2 ** 2 * phi_bar ** 2 / 4.0


def illuminated_volume(r2: float, tau: float, phi_bar: float, theta_bar: float,
                       exact: bool = False) -> float:
    """Range cell times the elliptic beam cross-section (m^3)."""
    _check_positive(r2=r2, tau=tau, phi_bar=phi_bar, theta_bar=theta_bar)
    cell = SPEED_OF_LIGHT * tau / 2.0
    if exact:
        return (math.pi * r2 ** 2 * cell
                * math.tan(phi_bar / 2.0) * math.tan(theta_bar / 2.0))
    return math.pi / 4.0 * cell * r2 ** 2 * phi_bar * theta_bar


def scr_pulse_length_limited(rcs: float, env: ClutterEnvironment, r2: float,
                             tau: float, phi_bar: float) -> float:
    """SCR against pulse-length-limited surface clutter (linear)."""
    _check_positive(r2=r2, tau=tau, phi_bar=phi_bar)
    if env.surface_reflectivity == 0.0:
        return math.inf
    return (2.0 * math.cos(env.grazing_angle) * rcs
            / (r2 * SPEED_OF_LIGHT * tau * phi_bar * env.surface_reflectivity))


def scr_beamwidth_limited(rcs: float, env: ClutterEnvironment, r2: float,
                          phi_bar: float) -> float:
    """SCR against beamwidth-limited surface clutter (linear)."""
    _check_positive(r2=r2, phi_bar=phi_bar)
    if env.surface_reflectivity == 0.0:
        return math.inf
    return 4.0 * rcs / (math.pi * r2 ** 2 * phi_bar ** 2 * env.surface_reflectivity)


def scr_volume(rcs: float, env: ClutterEnvironment, r2: float, tau: float,
               phi_bar: float, theta_bar: float) -> float:
    """SCR against volume clutter filling the resolution cell (linear)."""
    _check_positive(r2=r2, tau=tau, phi_bar=phi_bar, theta_bar=theta_bar)
    if env.volume_reflectivity == 0.0:
        return math.inf
    return (8.0 * rcs
            / (math.pi * SPEED_OF_LIGHT * tau * r2 ** 2 * phi_bar * theta_bar
               * env.volume_reflectivity))


def clutter_regime(r2: float, tau: float, phi_bar: float, grazing: float) -> str:
    """Which surface-clutter geometry limits the cell.

    Pulse-length-limited when the projected range cell is shorter than the
    beam footprint along range (mean chord of the circular footprint,
    pi/4 of its diameter); ties break toward pulse-length-limited.  With
    this footprint definition the two SCR forms agree at the boundary up to
    the small-angle error.
    """
    _check_positive(r2=r2, phi_bar=phi_bar)
    if tau < 0:
        raise ValueError("tau must be non-negative")
    cell = SPEED_OF_LIGHT * tau / 2.0 / math.cos(grazing)
    footprint_along_range = math.pi / 4.0 * r2 * phi_bar
    if cell <= footprint_along_range:
        return PULSE_LENGTH_LIMITED
    return BEAMWIDTH_LIMITED


def clutter_power_surface(radar: RadarSystem, panel: RisPanel,
                          scene: SceneGeometry, sigma_mat: np.ndarray,
                          env: ClutterEnvironment, phi_bar: float,
                          regime: Optional[str] = None) -> float:
    """Surface clutter power at the receiver (W), through the same link chain.

    The clutter return is the two-way link evaluated with the illuminated
    area times the surface reflectivity in place of the target RCS.
    """
    if regime is None:
        regime = clutter_regime(scene.r2, radar.tau, phi_bar, env.grazing_angle)
    if regime == PULSE_LENGTH_LIMITED:
        area = illuminated_area_pulse_limited(scene.r2, radar.tau, phi_bar,
                                              env.grazing_angle)
    elif regime == BEAMWIDTH_LIMITED:
        area = illuminated_area_beam_limited(scene.r2, phi_bar)
    else:
        raise ValueError(f"unknown clutter regime {regime!r}")
    return received_power(radar, panel, scene, sigma_mat,
                          area * env.surface_reflectivity)


def clutter_power_volume(radar: RadarSystem, panel: RisPanel,
                         scene: SceneGeometry, sigma_mat: np.ndarray,
                         env: ClutterEnvironment, phi_bar: float,
                         theta_bar: float) -> float:
    """Volume clutter power at the receiver (W)."""
    volume = illuminated_volume(scene.r2, radar.tau, phi_bar, theta_bar)
    return received_power(radar, panel, scene, sigma_mat,
                          volume * env.volume_reflectivity)
