"""Scene geometry, panel description, directional cosines and steering math.

Conventions: elevation theta is measured from the local boresight (z) axis,
azimuth phi in the x-y plane from the x axis; angles are radians everywhere
inside the package.  Positions are authoritative; ranges and angles are
always derived from them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

_ABS_TOL = 1e-9


@dataclass(frozen=True)
class DirectionalCosines:
    """Pair (u, v) = (sin(theta)cos(phi), sin(theta)sin(phi))."""

    u: float
    v: float

    def __post_init__(self):
        if self.u * self.u + self.v * self.v > 1.0 + _ABS_TOL:
            raise ValueError(f"directional cosines outside unit disk: ({self.u}, {self.v})")


def directional_cosines(theta: float, phi: float) -> DirectionalCosines:
    """Map an (elevation, azimuth) look direction to directional cosines.

    theta must lie in [0, pi/2] (front hemisphere), phi in (-pi, pi].
    """
    if not 0.0 <= theta <= math.pi / 2 + _ABS_TOL:
        raise ValueError(f"elevation angle {theta} outside [0, pi/2]")
    if not -math.pi - _ABS_TOL < phi <= math.pi + _ABS_TOL:
        raise ValueError(f"azimuth angle {phi} outside (-pi, pi]")
    return DirectionalCosines(math.sin(theta) * math.cos(phi),
                              math.sin(theta) * math.sin(phi))


def direction_vector(theta: float, phi: float) -> np.ndarray:
    """Unit vector for a look direction expressed in a local frame."""
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


@dataclass(frozen=True)
class RisPanel:
    """Rectangular panel of programmable patches centered on its local origin.

    n, m are the patch counts along the local x and y axes (both odd), dx/dy
    the patch pitch in meters, eta the unit patch efficiency and gain the
    linear power gain of a single patch.  patch_exponent shapes the
    cos^exponent patch radiation pattern.
    """

    n: int
    m: int
    dx: float
    dy: float
    eta: float = 0.8
    gain: float = 1.0
    patch_exponent: float = 1.5

    def __post_init__(self):
        for name, count in (("n", self.n), ("m", self.m)):
            if not isinstance(count, int) or count < 1 or count % 2 == 0:
                raise ValueError(f"panel.{name} must be an odd integer >= 1, got {count}")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("patch pitch must be positive")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"patch efficiency must lie in (0, 1], got {self.eta}")
        if self.gain <= 0:
            raise ValueError("patch gain must be positive (linear)")
        if self.patch_exponent <= 0:
            raise ValueError("patch pattern exponent must be positive")

    def x_positions(self) -> np.ndarray:
        """Patch-center x coordinates; symmetric about zero."""
        return (np.arange(self.n) - (self.n - 1) / 2.0) * self.dx

    def y_positions(self) -> np.ndarray:
        return (np.arange(self.m) - (self.m - 1) / 2.0) * self.dy

    def patch_centers(self) -> np.ndarray:
        """(n, m, 3) array of patch centers in the panel frame."""
        centers = np.zeros((self.n, self.m, 3))
        centers[:, :, 0] = self.x_positions()[:, None]
        centers[:, :, 1] = self.y_positions()[None, :]
        return centers


@dataclass(frozen=True)
class ReflectionProgram:
    """Programmable reflection coefficients of the panel (n x m, |value| <= 1)."""

    gamma: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.gamma, dtype=complex)
        if g.ndim != 2:
            raise ValueError("reflection program must be a 2-D matrix")
        if np.max(np.abs(g)) > 1.0 + _ABS_TOL:
            raise ValueError("passive patches require |gamma| <= 1 everywhere")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)


def manifold_vectors(panel: RisPanel, theta: float, phi: float,
                     lambda0: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vertical and horizontal manifold vectors of the panel for one direction.

    Entry k of the first vector is exp(j*pi*(dx/lambda0)*(2k-1-n)*u) for
    k = 1..n, and likewise along y with v and m; all entries have unit
    modulus.
    """
    if lambda0 <= 0:
        raise ValueError("wavelength must be positive")
    dc = directional_cosines(theta, phi)
    kx = 2.0 * np.arange(1, panel.n + 1) - 1 - panel.n
    ky = 2.0 * np.arange(1, panel.m + 1) - 1 - panel.m
    p1 = np.exp(1j * np.pi * (panel.dx / lambda0) * kx * dc.u)
    p2 = np.exp(1j * np.pi * (panel.dy / lambda0) * ky * dc.v)
    return p1, p2


def steering_matrix(panel: RisPanel, theta: float, phi: float,
                    lambda0: float) -> np.ndarray:
    """Rank-one n x m steering matrix p1 * p2^T for one look direction."""
    p1, p2 = manifold_vectors(panel, theta, phi, lambda0)
    return np.outer(p1, p2)


def phase_matched_program(pointing1: Tuple[float, float],
                          pointing2: Tuple[float, float],
                          panel: RisPanel, lambda0: float) -> ReflectionProgram:
    """Reflection program that aligns the phases of the two-hop path.

    pointing1 is the nominal radar direction, pointing2 the intended beam
    direction in the shadowed sector; the coefficients are the conjugate of
    the elementwise product of the two steering matrices, hence unit modulus.
    """
    s1 = steering_matrix(panel, pointing1[0], pointing1[1], lambda0)
    s2 = steering_matrix(panel, pointing2[0], pointing2[1], lambda0)
    return ReflectionProgram(np.conj(s1) * np.conj(s2))


def sigma_matrix(s1: np.ndarray, program, s2: np.ndarray) -> np.ndarray:
    """Elementwise product S1 ⊙ Γ ⊙ S2 describing the programmed reflection."""
    gamma = program.gamma if isinstance(program, ReflectionProgram) else np.asarray(program)
    s1 = np.asarray(s1)
    s2 = np.asarray(s2)
    if not (s1.shape == gamma.shape == s2.shape):
        raise ValueError(
            f"shape mismatch: S1 {s1.shape}, gamma {gamma.shape}, S2 {s2.shape}")
    return s1 * gamma * s2


def _normalize(vec, name: str) -> np.ndarray:
    v = np.asarray(vec, dtype=float)
    norm = np.linalg.norm(v)
    if norm <= 0.0:
        raise ValueError(f"{name} must be a non-zero vector")
    return v / norm


_WORLD_Z = np.array([0.0, 0.0, 1.0])
_WORLD_X = np.array([1.0, 0.0, 0.0])


def orthonormal_frame(boresight, up_hint=None) -> np.ndarray:
    """Right-handed frame (rows x, y, z) with z along the boresight.

    The y axis is the up hint projected onto the plane normal to the
    boresight (default: world z, falling back to world x near the poles).
    """
    z = _normalize(boresight, "boresight")
    hint = _WORLD_Z if up_hint is None else _normalize(up_hint, "up_hint")
    if abs(float(np.dot(hint, z))) > 1.0 - 1e-9:
        if up_hint is not None:
            raise ValueError("up hint is parallel to the boresight")
        hint = _WORLD_X
    y = _normalize(hint - np.dot(hint, z) * z, "up projection")
    x = np.cross(y, z)
    return np.vstack([x, y, z])


def _angles_in_frame(point, origin, frame) -> Tuple[float, float, float]:
    """(theta, phi, range) of a point seen from origin in the given frame."""
    delta = np.asarray(point, dtype=float) - np.asarray(origin, dtype=float)
    rng = float(np.linalg.norm(delta))
    if rng <= 0.0:
        raise ValueError("coincident points have no look direction")
    local = frame @ (delta / rng)
    theta = math.acos(min(1.0, max(-1.0, float(local[2]))))
    phi = math.atan2(float(local[1]), float(local[0]))
    if phi <= -math.pi:
        phi = math.pi
    return theta, phi, rng


@dataclass(frozen=True)
class SceneGeometry:
    """Radar / panel / target layout with all derived ranges and angles.

    The panel frame (CRS2) is z along ris_boresight with the y axis set by
    ris_up_hint (default: world z projected onto the panel plane), so a
    wall-mounted panel may take any attitude.  The radar frame (CRS1) is
    built the same way around radar_boresight.
    """

    radar_position: np.ndarray
    ris_position: np.ndarray
    target_position: np.ndarray
    radar_boresight: np.ndarray
    ris_boresight: np.ndarray
    radar_up_hint: Optional[np.ndarray] = None
    ris_up_hint: Optional[np.ndarray] = None

    radar_frame: np.ndarray = field(init=False, repr=False)
    ris_frame: np.ndarray = field(init=False, repr=False)
    r1: float = field(init=False)
    r2: float = field(init=False)
    ris_in_radar_frame: Tuple[float, float] = field(init=False)
    radar_in_ris_frame: Tuple[float, float] = field(init=False)
    target_in_ris_frame: Tuple[float, float] = field(init=False)

    def __post_init__(self):
        for name in ("radar_position", "ris_position", "target_position"):
            vec = np.asarray(getattr(self, name), dtype=float)
            if vec.shape != (3,):
                raise ValueError(f"{name} must be a 3-vector")
            vec.setflags(write=False)
            object.__setattr__(self, name, vec)
        object.__setattr__(self, "radar_frame",
                           orthonormal_frame(self.radar_boresight, self.radar_up_hint))
        object.__setattr__(self, "ris_frame",
                           orthonormal_frame(self.ris_boresight, self.ris_up_hint))

        th_r, ph_r, r1 = _angles_in_frame(self.ris_position, self.radar_position,
                                          self.radar_frame)
        th_rr, ph_rr, _ = _angles_in_frame(self.radar_position, self.ris_position,
                                           self.ris_frame)
        th_t, ph_t, r2 = _angles_in_frame(self.target_position, self.ris_position,
                                          self.ris_frame)
        for label, theta in (("RIS seen from the radar", th_r),
                             ("radar seen from the panel", th_rr),
                             ("target seen from the panel", th_t)):
            if theta > math.pi / 2 + _ABS_TOL:
                raise ValueError(f"{label} lies behind the boresight plane "
                                 f"(elevation {math.degrees(theta):.2f} deg)")
        object.__setattr__(self, "r1", r1)
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "ris_in_radar_frame", (th_r, ph_r))
        object.__setattr__(self, "radar_in_ris_frame", (th_rr, ph_rr))
        object.__setattr__(self, "target_in_ris_frame", (th_t, ph_t))

    def with_target_range(self, r2: float) -> "SceneGeometry":
        """Same layout with the target moved along its panel ray to range r2."""
        if r2 <= 0:
            raise ValueError("target range must be positive")
        ray = (self.target_position - self.ris_position) / self.r2
        return SceneGeometry(
            radar_position=self.radar_position,
            ris_position=self.ris_position,
            target_position=self.ris_position + r2 * ray,
            radar_boresight=self.radar_boresight,
            ris_boresight=self.ris_boresight,
            radar_up_hint=self.radar_up_hint,
            ris_up_hint=self.ris_up_hint,
        )


def scene_from_ris_angles(r1: float, radar_theta: float, radar_phi: float,
                          r2: float, target_theta: float, target_phi: float,
                          ris_position=(0.0, 0.0, 0.0),
                          ris_boresight=(0.0, 0.0, 1.0),
                          ris_up_hint=None) -> SceneGeometry:
    """Build a scene from panel-frame angles, radar aimed at the panel.

    The radar sits at range r1 along (radar_theta, radar_phi) in the panel
    frame and points its boresight at the panel center, so the panel is on
    the radar boresight; the target sits at r2 along (target_theta,
    target_phi).
    """
    frame = orthonormal_frame(ris_boresight, ris_up_hint)
    ris = np.asarray(ris_position, dtype=float)
    radar = ris + r1 * (frame.T @ direction_vector(radar_theta, radar_phi))
    target = ris + r2 * (frame.T @ direction_vector(target_theta, target_phi))
    return SceneGeometry(
        radar_position=radar,
        ris_position=ris,
        target_position=target,
        radar_boresight=ris - radar,
        ris_boresight=np.asarray(ris_boresight, dtype=float),
        ris_up_hint=None if ris_up_hint is None else np.asarray(ris_up_hint, dtype=float),
    )
