import math

import numpy as np
import pytest

from risradar import PulseWaveform, ambiguity_function, generate_burst, pulse_compress


@pytest.fixture
def lfm():
    # 1.5 us, 10 MHz sweep (time-bandwidth product 15), sampled at 2B
    return PulseWaveform(kind="lfm", tau=1.5e-6, bandwidth=10e6,
                         sample_rate=20e6)


@pytest.fixture
def rect():
    return PulseWaveform(kind="rect", tau=1.5e-6, bandwidth=1 / 1.5e-6,
                         sample_rate=4e6)


class TestPulseWaveform:
    def test_unit_energy(self, lfm, rect):
        assert lfm.energy == pytest.approx(1.0, abs=1e-6)
        assert rect.energy == pytest.approx(1.0, abs=1e-6)

    def test_rect_bandwidth_constraint(self):
        with pytest.raises(ValueError):
            PulseWaveform(kind="rect", tau=1e-6, bandwidth=5e6, sample_rate=20e6)

    def test_undersampling_rejected(self):
        with pytest.raises(ValueError):
            PulseWaveform(kind="lfm", tau=1e-6, bandwidth=10e6, sample_rate=5e6)

    def test_envelope_support(self, lfm):
        assert lfm.evaluate(-1e-9) == 0.0
        assert lfm.evaluate(lfm.tau + 1e-9) == 0.0
        assert abs(lfm.evaluate(lfm.tau / 2)) > 0.0

    def test_lfm_sweeps_full_band(self, lfm):
        # instantaneous frequency from the phase derivative spans ~[-B/2, B/2]
        t = np.linspace(1e-8, lfm.tau - 1e-8, 5000)
        phase = np.unwrap(np.angle(lfm.evaluate(t)))
        freq = np.gradient(phase, t) / (2 * np.pi)
        assert freq[0] == pytest.approx(-lfm.bandwidth / 2, rel=0.02)
        assert freq[-1] == pytest.approx(lfm.bandwidth / 2, rel=0.02)

    def test_spectrum_occupies_band(self, lfm):
        padded = np.concatenate([lfm.samples, np.zeros(4096 - lfm.sample_count)])
        spectrum = np.fft.fftshift(np.fft.fft(padded))
        freqs = np.fft.fftshift(np.fft.fftfreq(4096, 1 / lfm.sample_rate))
        power = np.abs(spectrum) ** 2
        in_band = power[np.abs(freqs) <= lfm.bandwidth / 2].sum() / power.sum()
        assert in_band > 0.9


class TestGenerateBurst:
    def test_single_pulse_energy(self, lfm):
        power = 400.0
        burst = generate_burst(lfm, 1, 66.7e-6, power)
        energy = np.sum(np.abs(burst) ** 2) / lfm.sample_rate
        assert energy == pytest.approx(power, rel=1e-6)

    def test_equispaced_replicas(self, lfm):
        pri = 66.7e-6
        burst = generate_burst(lfm, 8, pri, 1.0)
        envelope = np.abs(burst) > 1e-12
        edges = np.flatnonzero(np.diff(envelope.astype(int)) == 1)
        assert len(edges) == 7  # rising edges of pulses 2..8
        spacing = np.diff(edges) / lfm.sample_rate
        assert np.allclose(spacing, pri, atol=1.5 / lfm.sample_rate)

    def test_pri_shorter_than_pulse_rejected(self, lfm):
        with pytest.raises(ValueError):
            generate_burst(lfm, 4, 1e-6, 1.0)


class TestPulseCompress:
    def test_autocorrelation_peak_is_unity(self, lfm):
        stream = generate_burst(lfm, 1, 66.7e-6, 1.0)
        compressed = pulse_compress(stream, lfm)
        assert np.max(np.abs(compressed)) == pytest.approx(1.0, rel=1e-9)
        assert np.argmax(np.abs(compressed)) == 0  # zero delay

    def test_peak_at_echo_delay(self, lfm):
        delay = 13.37e-6
        fs = lfm.sample_rate
        total = int(round(40e-6 * fs))
        t = np.arange(total) / fs
        stream = 0.5 * lfm.evaluate(t - delay)
        compressed = pulse_compress(stream, lfm)
        peak = np.argmax(np.abs(compressed))
        assert abs(peak / fs - delay) <= 1.0 / fs

    def test_lfm_mainlobe_width(self, lfm):
        stream = generate_burst(lfm, 1, 66.7e-6, 1.0)
        fs_fine = 200e6
        fine = PulseWaveform(kind="lfm", tau=lfm.tau, bandwidth=lfm.bandwidth,
                             sample_rate=fs_fine)
        compressed = pulse_compress(generate_burst(fine, 1, 66.7e-6, 1.0), fine)
        mag = np.abs(compressed)
        # half-power width around the zero-delay peak (two-sided, in delay)
        level = mag[0] / math.sqrt(2.0)
        right = np.argmax(mag < level)
        width = 2 * right / fs_fine
        assert width == pytest.approx(0.886 / lfm.bandwidth, rel=0.15)


class TestAmbiguityFunction:
    def test_origin_is_unity(self, lfm):
        assert abs(ambiguity_function(lfm, 0.0, 0.0)) == pytest.approx(1.0,
                                                                       abs=1e-6)

    def test_bounded_by_one(self, lfm):
        rng = np.random.default_rng(9)
        for _ in range(30):
            delay = rng.uniform(-lfm.tau, lfm.tau)
            doppler = rng.uniform(-2e6, 2e6)
            assert abs(ambiguity_function(lfm, delay, doppler)) <= 1.0 + 1e-9

    def test_matches_autocorrelation_at_zero_doppler(self, lfm):
        value = abs(ambiguity_function(lfm, 0.3e-6, 0.0))
        # LFM autocorrelation magnitude |(1-|t|/tau) sinc(B t (1-|t|/tau))|
        t = 0.3e-6
        frac = 1 - abs(t) / lfm.tau
        expected = abs(frac * np.sinc(lfm.bandwidth * t * frac))
        assert value == pytest.approx(expected, abs=1e-3)

    def test_doppler_tolerance(self, lfm):
        # across UAV-scale Doppler shifts the compressed peak keeps >= 95%
        # of its zero-Doppler height (peak searched over delay)
        delays = np.linspace(-0.2e-6, 0.2e-6, 81)
        ref = max(abs(ambiguity_function(lfm, d, 0.0)) for d in delays)
        for doppler in (500.0, 2000.0, 4000.0):
            peak = max(abs(ambiguity_function(lfm, d, doppler)) for d in delays)
            assert peak >= 0.95 * ref

    def test_rect_doppler_null(self, rect):
        # unmodulated pulse has its first Doppler null at 1/tau
        value = abs(ambiguity_function(rect, 0.0, 1.0 / rect.tau))
        assert value == pytest.approx(0.0, abs=1e-6)
