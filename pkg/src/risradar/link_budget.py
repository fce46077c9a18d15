"""RIS-augmented radar range equation, losses and monostatic comparisons.

All gains and losses are linear inside this module; dB appears only in the
returned comparison figures.  The single-pulse SNR is provided both in its
pulse-energy form (the default, valid for modulated pulses) and in its
matched-bandwidth form; the two coincide when B*tau = 1.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .constants import BOLTZMANN, SPEED_OF_LIGHT, T0_KELVIN
from .geometry import RisPanel, SceneGeometry
from .pattern import analytic_broadside_beamwidths, patch_pattern


@dataclass(frozen=True)
class RadarSystem:
    """Transmit/receive description of the radar itself.

    peak_power in W, tx_gain and noise_figure linear, f0 and bandwidth in
    Hz, tau in s.  radar_pattern is an optional normalized power-pattern
    evaluator (theta, phi) -> [0, 1] in the radar frame; None means unity
    in the panel direction.
    """

    peak_power: float
    tx_gain: float
    f0: float
    bandwidth: float
    tau: float
    noise_figure: float
    radar_pattern: Optional[Callable[[float, float], float]] = None

    def __post_init__(self):
        for name in ("peak_power", "tx_gain", "f0", "bandwidth", "tau", "noise_figure"):
            if getattr(self, name) <= 0:
                raise ValueError(f"radar.{name} must be positive")
        if self.bandwidth * self.tau < 1.0 - 1e-9:
            raise ValueError("time-bandwidth product B*tau must be >= 1")

    @property
    def lambda0(self) -> float:
        return SPEED_OF_LIGHT / self.f0

    @property
    def noise_power(self) -> float:
        """In-band noise power k*T0*B*F_N in W."""
        return BOLTZMANN * T0_KELVIN * self.bandwidth * self.noise_figure

    def avg_power(self, pri: float) -> float:
        """Average transmit power P_T * tau / T for a pulse repetition interval."""
        if pri < self.tau:
            raise ValueError("PRI shorter than the pulse")
        return self.peak_power * self.tau / pri

    def pattern_gain(self, theta: float, phi: float) -> float:
        if self.radar_pattern is None:
            return 1.0
        return float(self.radar_pattern(theta, phi))


@dataclass(frozen=True)
class LossLedger:
    """Multiplicative loss factors, each >= 1 (linear)."""

    l_t: float = 1.0
    l_atm1: float = 1.0
    l_atm2: float = 1.0
    l_r: float = 1.0
    l_sp: float = 1.0
    l_ris: float = 1.0

    def __post_init__(self):
        for name in ("l_t", "l_atm1", "l_atm2", "l_r", "l_sp", "l_ris"):
            if getattr(self, name) < 1.0:
                raise ValueError(f"loss factor {name} must be >= 1 (linear)")

    @property
    def l_atm(self) -> float:
        return self.l_atm1 * self.l_atm2

    @property
    def total(self) -> float:
        return self.l_t * self.l_atm * self.l_r * self.l_sp * self.l_ris

    @property
    def hardware(self) -> float:
        """Everything except the processing loss; scales the echo amplitude."""
        return self.l_t * self.l_atm * self.l_r * self.l_ris


class FarFieldWarning(UserWarning):
    """One of the hop ranges sits below the panel far-field distance."""

    def __init__(self, r1: float, r2: float, ffd: float):
        self.r1 = r1
        self.r2 = r2
        self.ffd = ffd
        super().__init__(
            f"far-field distance {ffd:.2f} m exceeds a hop range "
            f"(r1={r1:.2f} m, r2={r2:.2f} m); plane-wave model is approximate")


def far_field_distance(panel: RisPanel, lambda0: float) -> float:
    """2 * max(dx*n, dy*m)^2 / lambda0."""
    aperture = max(panel.dx * panel.n, panel.dy * panel.m)
    return 2.0 * aperture * aperture / lambda0


def check_far_field(panel: RisPanel, scene: SceneGeometry, lambda0: float) -> None:
    ffd = far_field_distance(panel, lambda0)
    if min(scene.r1, scene.r2) < ffd:
        warnings.warn(FarFieldWarning(scene.r1, scene.r2, ffd), stacklevel=3)


def summed_reflection(sigma_mat: np.ndarray) -> float:
    """|1^T Sigma 1|, the coherent sum magnitude of the programmed panel."""
    return float(np.abs(np.sum(sigma_mat)))


def pattern_product(radar: RadarSystem, panel: RisPanel, scene: SceneGeometry) -> float:
    """Triple pattern factor: radar pattern times the two patch-pattern hits."""
    f_radar = radar.pattern_gain(*scene.ris_in_radar_frame)
    f_in = patch_pattern(scene.radar_in_ris_frame[0], panel.patch_exponent)
    f_out = patch_pattern(scene.target_in_ris_frame[0], panel.patch_exponent)
    return f_radar * f_in * f_out


def power_density_at_target(radar: RadarSystem, panel: RisPanel,
                            scene: SceneGeometry, sigma_mat: np.ndarray) -> float:
    """Power density (W/m^2) impinging on the target after the panel hop."""
    check_far_field(panel, scene, radar.lambda0)
    f_tot = pattern_product(radar, panel, scene)
    coherent = summed_reflection(sigma_mat)
    return (radar.tx_gain * radar.peak_power * panel.gain * f_tot
            * panel.dx * panel.dy * panel.eta
            / (16.0 * math.pi ** 2 * scene.r1 ** 2 * scene.r2 ** 2)
            * coherent ** 2)


def received_power(radar: RadarSystem, panel: RisPanel, scene: SceneGeometry,
                   sigma_mat: np.ndarray, rcs: float) -> float:
    """Two-way double-hop received power (W) for a target of the given RCS.

    The same reflection program is assumed on the return path (reciprocity),
    hence the fourth powers of both hop ranges and of the coherent sum.
    """
    if rcs < 0:
        raise ValueError("radar cross section must be non-negative")
    check_far_field(panel, scene, radar.lambda0)
    f_tot = pattern_product(radar, panel, scene)
    coherent = summed_reflection(sigma_mat)
    return (radar.tx_gain ** 2 * radar.peak_power * panel.gain ** 2 * f_tot ** 2
            * panel.dx ** 2 * panel.dy ** 2 * panel.eta ** 2
            * radar.lambda0 ** 2 * rcs
            / (scene.r1 ** 4 * scene.r2 ** 4 * (4.0 * math.pi) ** 5)
            * coherent ** 4)


def snr_single_pulse(radar: RadarSystem, panel: RisPanel, scene: SceneGeometry,
                     sigma_mat: np.ndarray, rcs: float,
                     form: str = "energy") -> float:
    """Single-pulse SNR (linear).

    form="energy" uses the pulse length (received energy over noise density,
    correct for modulated pulses); form="bandwidth" divides the received
    power by k*T0*B*F_N.  Both agree when B*tau = 1.
    """
    p_rx = received_power(radar, panel, scene, sigma_mat, rcs)
    if form == "energy":
        return p_rx * radar.tau / (BOLTZMANN * T0_KELVIN * radar.noise_figure)
    if form == "bandwidth":
        return p_rx / radar.noise_power
    raise ValueError(f"unknown SNR form {form!r}")


def snr_coherent(snr1: float, n_pulses: int, ledger: LossLedger) -> float:
    """Coherently integrated SNR with the system losses applied."""
    if n_pulses < 1:
        raise ValueError("pulse count must be >= 1")
    return snr1 * n_pulses / ledger.total


def snr_average_power_form(radar: RadarSystem, panel: RisPanel,
                           scene: SceneGeometry, sigma_mat: np.ndarray,
                           rcs: float, pri: float, dwell: float,
                           ledger: LossLedger) -> float:
    """Integrated SNR written through average power and dwell time.

    Algebraically identical to the pulse-form route; the implementation
    cross-checks the two paths and refuses to return silently diverging
    numbers.
    """
    ratio = dwell / pri
    n_pulses = round(ratio)
    if n_pulses < 1 or abs(ratio - n_pulses) > 1e-9 * max(1.0, ratio):
        raise ValueError(f"dwell/PRI = {ratio} is not a whole number of pulses")
    f_tot = pattern_product(radar, panel, scene)
    coherent = summed_reflection(sigma_mat)
    p_avg = radar.avg_power(pri)
    value = (radar.tx_gain ** 2 * panel.gain ** 2 * f_tot ** 2
             * panel.dx ** 2 * panel.dy ** 2 * panel.eta ** 2
             * radar.lambda0 ** 2 * rcs * p_avg * dwell
             / (scene.r1 ** 4 * scene.r2 ** 4 * (4.0 * math.pi) ** 5
                * BOLTZMANN * T0_KELVIN * radar.noise_figure * ledger.total)
             * coherent ** 4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FarFieldWarning)
        pulse_route = snr_coherent(
            snr_single_pulse(radar, panel, scene, sigma_mat, rcs), n_pulses, ledger)
    if pulse_route > 0 and abs(value - pulse_route) > 1e-12 * pulse_route:
        raise ArithmeticError("average-power and pulse-form SNR paths diverged")
    return value


@dataclass(frozen=True)
class EquivalentMonostatic:
    """Parameters of the monostatic radar equivalent to the double-hop link."""

    sigma_eq: float
    tx_gain_eq: float
    l_sp_eq: float
    l_ris_eq: float
    l_geom: float
    l_s_eq: float
    total_range: float
    phi_bar_eq: float

    def snr_coherent(self, radar: RadarSystem, n_pulses: int) -> float:
        """Integrated SNR evaluated through the equivalent-monostatic form."""
        if n_pulses < 1:
            raise ValueError("pulse count must be >= 1")
        return (self.tx_gain_eq ** 2 * radar.peak_power * radar.lambda0 ** 2
                * self.sigma_eq * n_pulses * radar.tau
                / (self.total_range ** 4 * (4.0 * math.pi) ** 3
                   * BOLTZMANN * T0_KELVIN * radar.noise_figure * self.l_s_eq))


def equivalent_monostatic(radar: RadarSystem, panel: RisPanel,
                          scene: SceneGeometry, sigma_mat: np.ndarray,
                          rcs: float, ledger: LossLedger) -> EquivalentMonostatic:
    """Map the double-hop link onto an equivalent monostatic configuration.

    The equivalent gain absorbs the panel size, the geometric loss is the
    fourth power of the harmonic mean of the two hop ranges normalized to
    the patch size, and the pattern mismatch is folded into the equivalent
    processing loss.
    """
    f_tot = pattern_product(radar, panel, scene)
    coherent = summed_reflection(sigma_mat)
    pattern4 = coherent ** 4
    nm4 = (float(panel.n) * float(panel.m)) ** 4
    l_sp_eq = math.inf if pattern4 == 0 else ledger.l_sp * nm4 / (f_tot ** 2 * pattern4)
    l_ris_eq = ledger.l_ris * math.pi ** 2
    patch_size = math.sqrt(panel.dx * panel.dy)
    l_geom = (2.0 / (patch_size / scene.r1 + patch_size / scene.r2)) ** 4
    l_s_eq = ledger.l_t * ledger.l_atm * ledger.l_r * l_sp_eq * l_ris_eq * l_geom
    phi_bar_ris, _ = analytic_broadside_beamwidths(panel)
    return EquivalentMonostatic(
        sigma_eq=rcs,
        tx_gain_eq=radar.tx_gain * panel.gain * panel.eta * panel.n ** 2 * panel.m ** 2,
        l_sp_eq=l_sp_eq,
        l_ris_eq=l_ris_eq,
        l_geom=l_geom,
        l_s_eq=l_s_eq,
        total_range=scene.r1 + scene.r2,
        phi_bar_eq=phi_bar_ris * scene.r2 / (scene.r1 + scene.r2),
    )


def monostatic_snr(radar: RadarSystem, rcs: float, target_range: float,
                   n_pulses: int, loss: float) -> float:
    """Plain monostatic radar equation (pulse-energy form), no panel factors."""
    if target_range <= 0:
        raise ValueError("target range must be positive")
    return (radar.peak_power * radar.tx_gain ** 2 * radar.lambda0 ** 2 * rcs
            * radar.tau * n_pulses
            / ((4.0 * math.pi) ** 3 * target_range ** 4
               * BOLTZMANN * T0_KELVIN * radar.noise_figure * loss))


def snr_loss_vs_clairvoyant(radar: RadarSystem, panel: RisPanel,
                            scene: SceneGeometry, sigma_mat: np.ndarray,
                            rcs: float, ledger: LossLedger,
                            n_pulses: int = 1, convention: str = "sum",
                            monostatic_loss: Optional[float] = None) -> float:
    """SNR loss (dB) against an unblocked monostatic radar at the same ranges.

    convention="sum" places the reference target at r1+r2,
    "root-sum-square" at sqrt(r1^2 + r2^2).  The reference keeps the
    transmit/atmospheric/receive/processing losses but not the panel loss;
    pass monostatic_loss to override that subset.
    """
    if convention == "sum":
        ref_range = scene.r1 + scene.r2
    elif convention == "root-sum-square":
        ref_range = math.hypot(scene.r1, scene.r2)
    else:
        raise ValueError(f"unknown range convention {convention!r}")
    if monostatic_loss is None:
        monostatic_loss = ledger.l_t * ledger.l_atm * ledger.l_r * ledger.l_sp
    ris_snr = snr_coherent(
        snr_single_pulse(radar, panel, scene, sigma_mat, rcs), n_pulses, ledger)
    reference = monostatic_snr(radar, rcs, ref_range, n_pulses, monostatic_loss)
    return 10.0 * math.log10(reference / ris_snr)
