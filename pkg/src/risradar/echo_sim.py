"""Signal-level dwell simulation: echoes, noise, acquisition, range-Doppler.

Amplitude convention: with unit-energy pulses, an echo amplitude of
sqrt(P_rx * tau / L_hw) carries the received pulse energy after the
hardware losses, so the matched-filter / Doppler-transform chain
reproduces the link-budget SNR without hidden scale factors.  Noise is
white circular Gaussian with per-sample power k*T0*F_N*fs (flat density
k*T0*F_N across the sampled band).

The random source is partitioned per pulse interval, so serial and
parallel synthesis produce bit-identical streams for the same seed.
"""

from __future__ import annotations

import math
import struct
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .constants import BOLTZMANN, SPEED_OF_LIGHT, T0_KELVIN
from .geometry import (RisPanel, SceneGeometry, phase_matched_program,
                       sigma_matrix, steering_matrix)
from .link_budget import FarFieldWarning, LossLedger, RadarSystem, received_power
from .timeline import DwellPlan
from .waveform import PulseWaveform, pulse_compress


class DopplerAmbiguityWarning(UserWarning):
    """Normalized Doppler magnitude reaches or exceeds 1/2."""


class TruncatedEchoWarning(UserWarning):
    """Part of the echo falls outside the synthesized stream."""


@dataclass(frozen=True)
class TargetTruth:
    """Ground truth for one point target, with all derived echo parameters."""

    position: np.ndarray
    velocity: np.ndarray
    rcs: float
    radial_velocity: float       # toward the panel, m/s
    doppler: float               # Hz
    normalized_doppler: float    # cycles per pulse
    delay_total: float           # two-way radar->panel->target->panel->radar, s
    delay_one_hop: float         # radar->panel->target->panel, s
    amplitude: complex

    def __post_init__(self):
        for name in ("position", "velocity"):
            vec = np.asarray(getattr(self, name), dtype=float)
            vec.setflags(write=False)
            object.__setattr__(self, name, vec)


def target_truth(scene: SceneGeometry, radar: RadarSystem, panel: RisPanel,
                 sigma_mat: np.ndarray, ledger: LossLedger, rcs: float,
                 pri: float, velocity=(0.0, 0.0, 0.0)) -> TargetTruth:
    """Echo parameters for the scene's target with the given motion and RCS."""
    velocity = np.asarray(velocity, dtype=float)
    toward_ris = (scene.ris_position - scene.target_position) / scene.r2
    v_radial = float(np.dot(toward_ris, velocity))
    doppler = 2.0 * v_radial / radar.lambda0
    nu = doppler * pri
    if abs(nu) >= 0.5:
        warnings.warn(DopplerAmbiguityWarning(
            f"normalized Doppler {nu:.3f} is ambiguous (|nu| >= 0.5)"), stacklevel=2)
    delay_total = 2.0 * (scene.r1 + scene.r2) / SPEED_OF_LIGHT
    delay_one_hop = (scene.r1 + 2.0 * scene.r2) / SPEED_OF_LIGHT
    p_rx = received_power(radar, panel, scene, sigma_mat, rcs)
    magnitude = math.sqrt(p_rx * radar.tau / ledger.hardware)
    phase = -2.0 * math.pi * radar.f0 * delay_total
    return TargetTruth(
        position=scene.target_position,
        velocity=velocity,
        rcs=rcs,
        radial_velocity=v_radial,
        doppler=doppler,
        normalized_doppler=nu,
        delay_total=delay_total,
        delay_one_hop=delay_one_hop,
        amplitude=magnitude * complex(math.cos(phase), math.sin(phase)),
    )


def synthesize_target_echo(waveform: PulseWaveform, truth: TargetTruth,
                           n_pulses: int, pri: float,
                           duration: Optional[float] = None) -> np.ndarray:
    """Delayed, Doppler-shifted pulse train a * p(t - t0 - iT) e^{j2pi fd t}.

    The Doppler exponential is applied at the exact sample times, so the
    stop-and-hop pulse-to-pulse phase progression e^{j2pi nu i} and the
    (small) intra-pulse rotation are both present in the samples.
    """
    fs = waveform.sample_rate
    if duration is None:
        duration = (n_pulses - 1) * pri + truth.delay_total + 2.0 * waveform.tau
    total = int(round(duration * fs))
    out = np.zeros(total, dtype=complex)
    last_end = truth.delay_total + (n_pulses - 1) * pri + waveform.tau
    if truth.delay_total < 0 or last_end > duration:
        warnings.warn(TruncatedEchoWarning(
            f"echo spanning up to {last_end * 1e6:.2f} us exceeds the "
            f"{duration * 1e6:.2f} us stream"), stacklevel=2)
    for i in range(n_pulses):
        start = truth.delay_total + i * pri
        k0 = max(0, int(math.floor(start * fs)))
        k1 = min(total, int(math.ceil((start + waveform.tau) * fs)) + 1)
        if k0 >= k1:
            continue
        t = np.arange(k0, k1) / fs
        out[k0:k1] += (truth.amplitude * waveform.evaluate(t - start)
                       * np.exp(2j * math.pi * truth.doppler * t))
    return out


def noise_power_per_sample(radar: RadarSystem, sample_rate: float) -> float:
    """k*T0*F_N*fs: white-noise power per complex sample at this rate."""
    return BOLTZMANN * T0_KELVIN * radar.noise_figure * sample_rate


def _noise_segment(seed: int, index: int, count: int, scale: float) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=seed, spawn_key=(0, index))))
    block = rng.standard_normal(2 * count)
    return scale * (block[0::2] + 1j * block[1::2])


def add_noise(stream: np.ndarray, radar: RadarSystem, sample_rate: float,
              seed: int, pri: Optional[float] = None,
              parallel: bool = False) -> np.ndarray:
    """Add receiver noise, seed-reproducibly, partitioned per pulse interval.

    Each pulse interval draws from its own counter-keyed generator, so the
    result is bit-identical whether segments are filled serially or
    concurrently.
    """
    total = len(stream)
    scale = math.sqrt(noise_power_per_sample(radar, sample_rate) / 2.0)
    if pri is None:
        bounds = [0, total]
    else:
        per = pri * sample_rate
        count = max(1, int(math.ceil(total / per)))
        bounds = [min(total, int(round(i * per))) for i in range(count)] + [total]
    out = stream.astype(complex, copy=True)

    def fill(i: int):
        lo, hi = bounds[i], bounds[i + 1]
        if hi > lo:
            out[lo:hi] += _noise_segment(seed, i, hi - lo, scale)

    indices = range(len(bounds) - 1)
    if parallel:
        with ThreadPoolExecutor() as pool:
            list(pool.map(fill, indices))
    else:
        for i in indices:
            fill(i)
    return out


# --- acquisition ----------------------------------------------------------

_INTERP_HALF_WIDTH = 48
_INTERP_KAISER_BETA = 8.6


class _InterpPlan:
    """Precomputed gather indices and windowed-sinc weights for fixed times."""

    def __init__(self, times: np.ndarray, sample_rate: float, length: int):
        x = np.asarray(times, dtype=float) * sample_rate
        base = np.floor(x).astype(np.int64)
        offsets = np.arange(-_INTERP_HALF_WIDTH + 1, _INTERP_HALF_WIDTH + 1)
        idx = base[:, None] + offsets[None, :]
        frac = x[:, None] - idx
        window_arg = frac / _INTERP_HALF_WIDTH
        inside = np.abs(window_arg) < 1.0
        window = np.where(
            inside,
            np.i0(_INTERP_KAISER_BETA
                  * np.sqrt(np.clip(1.0 - window_arg ** 2, 0.0, 1.0)))
            / np.i0(_INTERP_KAISER_BETA),
            0.0)
        weights = np.sinc(frac) * window
        weights[(idx < 0) | (idx >= length)] = 0.0
        self.indices = np.clip(idx, 0, length - 1)
        self.weights = weights
        self.length = length

    def apply(self, stream: np.ndarray) -> np.ndarray:
        if len(stream) != self.length:
            raise ValueError("stream length does not match the sampling plan")
        return np.sum(stream[self.indices] * self.weights, axis=1)


def bandlimited_sample(stream: np.ndarray, sample_rate: float,
                       times: np.ndarray) -> np.ndarray:
    """Windowed-sinc interpolation of a sampled stream at arbitrary times."""
    return _InterpPlan(times, sample_rate, len(stream)).apply(stream)


@dataclass(frozen=True)
class DataMatrix:
    """Fast-time x slow-time samples of the compressed stream.

    Row h (0-based) holds the sample at delay 2*(r1 + r2_min)/c + h/B from
    each pulse start; rows span ranges r2_min .. r2_min + h_max * c/(2B)
    past the panel.
    """

    data: np.ndarray
    r1: float
    r2_min: float
    unambiguous_range: float
    bandwidth: float
    sample_rate: float
    pri: float

    def __post_init__(self):
        d = np.asarray(self.data, dtype=complex)
        d.setflags(write=False)
        object.__setattr__(self, "data", d)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_pulses(self) -> int:
        return self.data.shape[1]

    @property
    def range_bin(self) -> float:
        return SPEED_OF_LIGHT / (2.0 * self.bandwidth)

    @property
    def base_delay(self) -> float:
        return 2.0 * (self.r1 + self.r2_min) / SPEED_OF_LIGHT

    def fast_time_bin(self, delay_total: float) -> float:
        """Fractional row index of a two-way delay (0-based)."""
        return (delay_total - self.base_delay) * self.bandwidth


class DataMatrixSampler:
    """Reusable fast-time/slow-time sampler for streams of a fixed length.

    The instants are base_delay + h/B + l*T; the row count follows from
    r1 + r2_min + h_max * c/(2B) = R_ua.  Off-grid instants are taken by
    band-limited interpolation, so the sampling definition holds for any
    stream rate.  Building the interpolation plan is the expensive part;
    Monte-Carlo loops construct this once and call sample() per stream.
    """

    def __init__(self, plan: DwellPlan, r2_min: float, bandwidth: float,
                 sample_rate: float, stream_length: int):
        if r2_min < 0:
            raise ValueError("minimum operative range must be non-negative")
        span = plan.unambiguous_range - plan.r1 - r2_min
        if span <= 0:
            raise ValueError("minimum operative range reaches past the "
                             "unambiguous range")
        range_bin = SPEED_OF_LIGHT / (2.0 * bandwidth)
        h_max = int(span / range_bin + 1e-9)
        base_delay = 2.0 * (plan.r1 + r2_min) / SPEED_OF_LIGHT
        fast = base_delay + np.arange(h_max + 1) / bandwidth
        slow = np.arange(plan.n_pulses) * plan.pri
        times = (fast[:, None] + slow[None, :]).ravel()
        if times.max() * sample_rate > stream_length - 1:
            raise ValueError("compressed stream does not span all listening windows")
        self._interp = _InterpPlan(times, sample_rate, stream_length)
        self._shape = (h_max + 1, plan.n_pulses)
        self.plan = plan
        self.r2_min = r2_min
        self.bandwidth = bandwidth
        self.sample_rate = sample_rate

    def sample(self, compressed: np.ndarray) -> DataMatrix:
        data = self._interp.apply(compressed).reshape(self._shape)
        return DataMatrix(data=data, r1=self.plan.r1, r2_min=self.r2_min,
                          unambiguous_range=self.plan.unambiguous_range,
                          bandwidth=self.bandwidth, sample_rate=self.sample_rate,
                          pri=self.plan.pri)


def build_data_matrix(compressed: np.ndarray, plan: DwellPlan, r2_min: float,
                      bandwidth: float, sample_rate: float) -> DataMatrix:
    """Sample the compressed stream on the fast-time/slow-time grid."""
    sampler = DataMatrixSampler(plan, r2_min, bandwidth, sample_rate,
                                len(compressed))
    return sampler.sample(compressed)


def range_doppler_map(matrix: DataMatrix) -> np.ndarray:
    """Power map from a slow-time DFT of every range row.

    Doppler bin k collects normalized Doppler k/N_p (negative frequencies
    wrap to the upper bins); an on-grid target gains the full pulse count
    coherently.
    """
    if matrix.n_pulses < 2:
        raise ValueError("Doppler processing needs at least two pulses")
    spectrum = np.fft.fft(matrix.data, axis=1)
    return np.abs(spectrum) ** 2


def resolution_report(bandwidth: float, n_pulses: int, pri: float) -> Tuple[float, float]:
    """(range resolution c/2B in m, Doppler resolution 1/(Np*T) in Hz)."""
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    return SPEED_OF_LIGHT / (2.0 * bandwidth), 1.0 / (n_pulses * pri)


# --- dwell orchestration ----------------------------------------------------


@dataclass(frozen=True)
class TargetSpec:
    """Scenario input for one simulated point target."""

    position: np.ndarray
    velocity: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    rcs: float = 0.02


@dataclass(frozen=True)
class SimulationResult:
    data_matrix: DataMatrix
    rd_map: np.ndarray
    truths: Tuple[TargetTruth, ...]


def dwell_duration(plan: DwellPlan, waveform: PulseWaveform) -> float:
    """Stream duration covering every pulse's full listening window."""
    return ((plan.n_pulses - 1) * plan.pri + plan.listening_window[1]
            + 2.0 * waveform.tau)


def simulate_dwell(scene: SceneGeometry, radar: RadarSystem, panel: RisPanel,
                   pointing1: Tuple[float, float], pointing2: Tuple[float, float],
                   ledger: LossLedger, plan: DwellPlan, waveform: PulseWaveform,
                   targets: Optional[Sequence[TargetSpec]] = None,
                   r2_min: float = 0.0, seed: int = 0, noise: bool = True,
                   parallel: bool = False,
                   clutter: Optional[Tuple[float, float, int]] = None,
                   ) -> SimulationResult:
    """Synthesize one dwell end to end and form the range-Doppler map.

    The reflection program is phase matched to the two pointings; each
    target contributes through its own outgoing steering matrix.  clutter,
    if given, is (ring range, received clutter power, scatterer count): a
    zero-Doppler ring of complex-Gaussian scatterers whose aggregate power
    matches the clutter budget.
    """
    lambda0 = radar.lambda0
    program = phase_matched_program(pointing1, pointing2, panel, lambda0)
    s1 = steering_matrix(panel, *scene.radar_in_ris_frame, lambda0)
    duration = dwell_duration(plan, waveform)
    total = int(round(duration * waveform.sample_rate))
    stream = np.zeros(total, dtype=complex)

    if targets is None:
        targets = [TargetSpec(position=scene.target_position)]
    truths = []
    for spec in targets:
        local = replace(scene, target_position=np.asarray(spec.position, float))
        s2 = steering_matrix(panel, *local.target_in_ris_frame, lambda0)
        sig = sigma_matrix(s1, program, s2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FarFieldWarning)
            truth = target_truth(local, radar, panel, sig, ledger,
                                 spec.rcs, plan.pri, spec.velocity)
        truths.append(truth)
        stream += synthesize_target_echo(waveform, truth, plan.n_pulses,
                                         plan.pri, duration)

    if clutter is not None:
        ring_range, clutter_rx_power, count = clutter
        rng = np.random.Generator(np.random.PCG64(
            np.random.SeedSequence(entropy=seed, spawn_key=(1,))))
        per = clutter_rx_power * radar.tau / (ledger.hardware * count)
        amps = math.sqrt(per / 2.0) * (rng.standard_normal(count)
                                       + 1j * rng.standard_normal(count))
        delay = 2.0 * (scene.r1 + ring_range) / SPEED_OF_LIGHT
        fs = waveform.sample_rate
        for i in range(plan.n_pulses):
            start = delay + i * plan.pri
            k0 = max(0, int(math.floor(start * fs)))
            k1 = min(total, int(math.ceil((start + waveform.tau) * fs)) + 1)
            if k0 >= k1:
                continue
            t = np.arange(k0, k1) / fs
            stream[k0:k1] += complex(np.sum(amps)) * waveform.evaluate(t - start)

    if noise:
        stream = add_noise(stream, radar, waveform.sample_rate, seed,
                           pri=plan.pri, parallel=parallel)

    compressed = pulse_compress(stream, waveform)
    matrix = build_data_matrix(compressed, plan, r2_min,
                               waveform.bandwidth, waveform.sample_rate)
    return SimulationResult(data_matrix=matrix, rd_map=range_doppler_map(matrix),
                            truths=tuple(truths))


# --- binary container -------------------------------------------------------

_MAGIC = b"RISD"
_VERSION = 1


def write_data_matrix(path, matrix: DataMatrix) -> None:
    """Binary container: magic, u16 version, u64 rows and pulse count,
    f64 sample rate, bandwidth and PRI (little endian), then row-major
    interleaved re/im float64 samples.  Written atomically."""
    from .output import atomic_write_bytes

    interleaved = np.empty(matrix.rows * matrix.n_pulses * 2)
    flat = matrix.data.ravel()
    interleaved[0::2] = flat.real
    interleaved[1::2] = flat.imag
    payload = b"".join([
        _MAGIC,
        struct.pack("<H", _VERSION),
        struct.pack("<QQ", matrix.rows, matrix.n_pulses),
        struct.pack("<ddd", matrix.sample_rate, matrix.bandwidth, matrix.pri),
        interleaved.astype("<f8").tobytes(),
    ])
    atomic_write_bytes(str(path), payload)


def read_data_matrix(path):
    """Read the binary container back as (data, header dict)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a data-matrix file (magic {magic!r})")
        version, = struct.unpack("<H", fh.read(2))
        if version != _VERSION:
            raise ValueError(f"unsupported container version {version}")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        fs, bandwidth, pri = struct.unpack("<ddd", fh.read(24))
        raw = np.frombuffer(fh.read(rows * cols * 16), dtype="<f8")
    data = (raw[0::2] + 1j * raw[1::2]).reshape(rows, cols)
    return data, {"sample_rate": fs, "bandwidth": bandwidth, "pri": pri,
                  "rows": rows, "n_pulses": cols}
