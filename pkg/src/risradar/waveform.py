"""Baseband pulse waveforms: burst synthesis, compression and ambiguity.

Pulses are unit energy on their sample grid, so the matched-filter output
for an echo a*p(t - t0) peaks at the complex amplitude a itself.  The
complex envelope is available analytically at arbitrary times, which lets
echoes be synthesized off-grid without interpolation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

RECT = "rect"
LFM = "lfm"


@dataclass(frozen=True)
class PulseWaveform:
    """Unit-energy baseband pulse of duration tau and bandwidth.

    kind "rect" is the unmodulated pulse (bandwidth fixed at 1/tau); "lfm"
    sweeps -B/2..B/2 linearly across the pulse.  sample_rate must give at
    least min_oversampling complex samples per unit bandwidth.
    """

    kind: str
    tau: float
    bandwidth: float
    sample_rate: float
    min_oversampling: float = 2.0

    def __post_init__(self):
        if self.kind not in (RECT, LFM):
            raise ValueError(f"unknown waveform kind {self.kind!r}")
        if self.tau <= 0 or self.bandwidth <= 0 or self.sample_rate <= 0:
            raise ValueError("tau, bandwidth and sample_rate must be positive")
        if self.kind == RECT and abs(self.bandwidth * self.tau - 1.0) > 1e-9:
            raise ValueError("an unmodulated pulse has bandwidth 1/tau")
        if self.sample_rate < self.min_oversampling * self.bandwidth - 1e-9:
            raise ValueError(
                f"sample rate {self.sample_rate} below "
                f"{self.min_oversampling} x bandwidth {self.bandwidth}")

    @property
    def sample_count(self) -> int:
        return max(1, round(self.tau * self.sample_rate))

    @cached_property
    def _amplitude(self) -> float:
        # makes the discrete energy (1/fs) * sum |p|^2 exactly one
        return math.sqrt(self.sample_rate / self.sample_count)

    def evaluate(self, t) -> np.ndarray:
        """Complex envelope at arbitrary times (zero outside [0, tau))."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t < self.tau)
        if self.kind == RECT:
            phase = np.zeros_like(t)
        else:
            centred = t - self.tau / 2.0
            phase = math.pi * (self.bandwidth / self.tau) * centred * centred
        return np.where(inside, self._amplitude * np.exp(1j * phase), 0.0 + 0.0j)

    @cached_property
    def samples(self) -> np.ndarray:
        """Envelope on its own grid k/fs, unit energy, read-only."""
        grid = np.arange(self.sample_count) / self.sample_rate
        out = self.evaluate(grid)
        out.setflags(write=False)
        return out

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2)) / self.sample_rate


def generate_burst(waveform: PulseWaveform, n_pulses: int, pri: float,
                   peak_power: float, duration: float | None = None) -> np.ndarray:
    """Coherent train sqrt(P_T) * sum_i p(t - i*T) on the waveform's grid."""
    if n_pulses < 1:
        raise ValueError("pulse count must be >= 1")
    if pri < waveform.tau:
        raise ValueError("PRI shorter than the pulse length")
    if peak_power <= 0:
        raise ValueError("peak power must be positive")
    fs = waveform.sample_rate
    if duration is None:
        duration = n_pulses * pri
    total = int(round(duration * fs))
    out = np.zeros(total, dtype=complex)
    scale = math.sqrt(peak_power)
    for i in range(n_pulses):
        start = i * pri
        k0 = max(0, int(math.floor(start * fs)))
        k1 = min(total, int(math.ceil((start + waveform.tau) * fs)) + 1)
        if k0 >= total:
            break
        t = np.arange(k0, k1) / fs
        out[k0:k1] += scale * waveform.evaluate(t - start)
    return out


def pulse_compress(stream: np.ndarray, waveform: PulseWaveform) -> np.ndarray:
    """Matched filter against the pulse; output index k is the delay k/fs.

    For a noiseless echo a*p(t - t0) the output approximates a*r_p(k/fs -
    t0) with r_p(0) = 1, so the peak value reads off the echo amplitude.
    """
    ref = waveform.samples
    full = np.correlate(stream, ref, mode="full")
    return full[len(ref) - 1:] / waveform.sample_rate


def ambiguity_function(waveform: PulseWaveform, delay: float, doppler: float,
                       quadrature_points: int = 8192) -> complex:
    """Narrowband ambiguity integral of the pulse at one (delay, Doppler).

    Midpoint quadrature of p(t) p*(t - delay) e^{j 2 pi fd t} over the
    support overlap; equals 1 at the origin for the unit-energy pulse.
    """
    lo = max(0.0, delay)
    hi = min(waveform.tau, waveform.tau + delay)
    if hi <= lo:
        return 0.0 + 0.0j
    h = (hi - lo) / quadrature_points
    t = lo + (np.arange(quadrature_points) + 0.5) * h
    values = (waveform.evaluate(t) * np.conj(waveform.evaluate(t - delay))
              * np.exp(2j * math.pi * doppler * t))
    return complex(np.sum(values) * h)
