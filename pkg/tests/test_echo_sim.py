import math
import warnings

import numpy as np
import pytest

from risradar import (DataMatrixSampler, DopplerAmbiguityWarning, LossLedger,
                      PulseWaveform, TargetSpec, TruncatedEchoWarning,
                      add_noise, build_data_matrix, build_dwell_plan,
                      dwell_duration, matched_sigma, noise_power_per_sample,
                      pulse_compress, range_doppler_map, read_data_matrix,
                      received_power, resolution_report, simulate_dwell,
                      synthesize_target_echo, target_truth, write_data_matrix)
from risradar.constants import BOLTZMANN, SPEED_OF_LIGHT, T0_KELVIN

from conftest import MICRO_UAV_RCS, make_panel, make_scene

RANGE_BIN = SPEED_OF_LIGHT / 20e6  # c / (2 * 10 MHz)


@pytest.fixture
def wave():
    return PulseWaveform(kind="lfm", tau=1.5e-6, bandwidth=10e6,
                         sample_rate=20e6)


@pytest.fixture
def plan():
    return build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=10e3, n_pulses=16)


def grid_scene(bin_index=40, r2_min=0.0):
    """Scene whose target sits exactly on fast-time bin bin_index."""
    return make_scene(r2=r2_min + bin_index * RANGE_BIN)


class TestTargetTruth:
    def test_delays_and_doppler(self, radar, panel101, ledger, plan):
        scene = make_scene(r2=1500.0)
        sig = matched_sigma(panel101, scene, radar.lambda0)
        velocity = 12.0 * (scene.ris_position - scene.target_position) / scene.r2
        truth = target_truth(scene, radar, panel101, sig, ledger,
                             MICRO_UAV_RCS, plan.pri, velocity)
        assert truth.delay_total == pytest.approx(2 * 2500.0 / SPEED_OF_LIGHT,
                                                  rel=1e-12)
        assert truth.delay_one_hop == pytest.approx(
            (1000.0 + 2 * 1500.0) / SPEED_OF_LIGHT, rel=1e-12)
        assert truth.radial_velocity == pytest.approx(12.0, rel=1e-12)
        assert truth.doppler == pytest.approx(2 * 12.0 / radar.lambda0, rel=1e-12)
        assert truth.normalized_doppler == pytest.approx(truth.doppler * plan.pri,
                                                         rel=1e-12)

    def test_amplitude_carries_received_pulse_energy(self, radar, panel101,
                                                     ledger, plan):
        scene = make_scene()
        sig = matched_sigma(panel101, scene, radar.lambda0)
        truth = target_truth(scene, radar, panel101, sig, ledger,
                             MICRO_UAV_RCS, plan.pri)
        p_rx = received_power(radar, panel101, scene, sig, MICRO_UAV_RCS)
        assert abs(truth.amplitude) ** 2 == pytest.approx(
            p_rx * radar.tau / ledger.hardware, rel=1e-9)

    def test_ambiguous_doppler_warns(self, radar, panel101, ledger, plan):
        scene = make_scene()
        sig = matched_sigma(panel101, scene, radar.lambda0)
        fast = 200.0 * (scene.ris_position - scene.target_position) / scene.r2
        with pytest.warns(DopplerAmbiguityWarning):
            target_truth(scene, radar, panel101, sig, ledger, MICRO_UAV_RCS,
                         plan.pri, fast)


class TestSynthesizeEcho:
    def test_static_target_identical_pulses(self, radar, panel101, ledger, wave):
        # sample-aligned PRI so replicas land on identical grid offsets
        pri = 1334 / wave.sample_rate
        scene = grid_scene()
        sig = matched_sigma(panel101, scene, radar.lambda0)
        truth = target_truth(scene, radar, panel101, sig, ledger,
                             MICRO_UAV_RCS, pri)
        stream = synthesize_target_echo(wave, truth, 3, pri)
        per = 1334
        first = stream[:per]
        second = stream[per:2 * per]
        assert np.allclose(first, second, atol=1e-30)

    def test_quarter_cycle_phase_steps(self, radar, panel101, ledger, wave):
        pri = 1334 / wave.sample_rate
        scene = grid_scene()
        sig = matched_sigma(panel101, scene, radar.lambda0)
        # radial speed giving normalized Doppler exactly 1/4
        v_r = 0.25 / pri * radar.lambda0 / 2.0
        velocity = v_r * (scene.ris_position - scene.target_position) / scene.r2
        truth = target_truth(scene, radar, panel101, sig, ledger,
                             MICRO_UAV_RCS, pri, velocity)
        assert truth.normalized_doppler == pytest.approx(0.25, rel=1e-12)
        stream = synthesize_target_echo(wave, truth, 4, pri,
                                        duration=4 * pri + truth.delay_total)
        compressed = pulse_compress(stream, wave)
        sampler_times = truth.delay_total + pri * np.arange(4)
        from risradar import bandlimited_sample
        peaks = bandlimited_sample(compressed, wave.sample_rate, sampler_times)
        steps = peaks[1:] / peaks[:-1]
        assert np.allclose(np.angle(steps), math.pi / 2, atol=1e-3)
        assert np.allclose(np.abs(steps), 1.0, atol=1e-3)

    def test_truncated_echo_warns(self, radar, panel101, ledger, wave, plan):
        scene = grid_scene()
        sig = matched_sigma(panel101, scene, radar.lambda0)
        truth = target_truth(scene, radar, panel101, sig, ledger,
                             MICRO_UAV_RCS, plan.pri)
        with pytest.warns(TruncatedEchoWarning):
            synthesize_target_echo(wave, truth, 4, plan.pri,
                                   duration=truth.delay_total)


class TestAddNoise:
    def test_variance_matches_target(self, radar, wave):
        stream = np.zeros(1_000_000, dtype=complex)
        noisy = add_noise(stream, radar, wave.sample_rate, seed=7)
        measured = np.mean(np.abs(noisy) ** 2)
        expected = noise_power_per_sample(radar, wave.sample_rate)
        assert measured == pytest.approx(expected, rel=0.01)

    def test_zero_rate_zero_power(self, radar):
        assert noise_power_per_sample(radar, 0.0) == 0.0
        # and the in-band form k*T0*B*F_N vanishes with the bandwidth
        assert BOLTZMANN * T0_KELVIN * radar.noise_figure * 0.0 == 0.0

    def test_deterministic_for_fixed_seed(self, radar, wave):
        stream = np.zeros(50_000, dtype=complex)
        a = add_noise(stream, radar, wave.sample_rate, seed=42, pri=66.71e-6)
        b = add_noise(stream, radar, wave.sample_rate, seed=42, pri=66.71e-6)
        assert np.array_equal(a, b)
        c = add_noise(stream, radar, wave.sample_rate, seed=43, pri=66.71e-6)
        assert not np.array_equal(a, c)

    def test_parallel_matches_serial(self, radar, wave):
        stream = np.zeros(200_000, dtype=complex)
        serial = add_noise(stream, radar, wave.sample_rate, seed=5,
                           pri=66.71e-6, parallel=False)
        parallel = add_noise(stream, radar, wave.sample_rate, seed=5,
                             pri=66.71e-6, parallel=True)
        assert np.array_equal(serial, parallel)


class TestDataMatrix:
    def test_row_count_formula(self, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=10e3, n_pulses=4)
        stream = np.zeros(int(dwell_duration(plan, wave) * wave.sample_rate),
                          dtype=complex)
        matrix = build_data_matrix(stream, plan, 0.0, wave.bandwidth,
                                   wave.sample_rate)
        assert matrix.rows == 601  # h_max = 600 for 9 km span at 15 m bins
        assert matrix.n_pulses == 4

    def test_min_range_past_unambiguous_rejected(self, wave, plan):
        stream = np.zeros(200_000, dtype=complex)
        with pytest.raises(ValueError):
            build_data_matrix(stream, plan, 9500.0, wave.bandwidth,
                              wave.sample_rate)

    def test_short_stream_rejected(self, wave, plan):
        with pytest.raises(ValueError):
            build_data_matrix(np.zeros(10, dtype=complex), plan, 0.0,
                              wave.bandwidth, wave.sample_rate)

    def test_target_energy_in_expected_row(self, radar, panel101, ledger, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=10e3, n_pulses=8)
        scene = grid_scene(bin_index=40)
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                noise=False)
        row_power = np.sum(np.abs(result.data_matrix.data) ** 2, axis=1)
        assert np.argmax(row_power) == 40
        truth = result.truths[0]
        assert result.data_matrix.fast_time_bin(truth.delay_total) \
            == pytest.approx(40.0, abs=1e-9)

    def test_noise_only_rows_flat(self, radar, panel101, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=2e3, n_pulses=32)
        total = int(round(dwell_duration(plan, wave) * wave.sample_rate))
        noisy = add_noise(np.zeros(total, dtype=complex), radar,
                          wave.sample_rate, seed=11, pri=plan.pri)
        compressed = pulse_compress(noisy, wave)
        matrix = build_data_matrix(compressed, plan, 0.0, wave.bandwidth,
                                   wave.sample_rate)
        row_power = np.mean(np.abs(matrix.data) ** 2, axis=1)
        # each row mean is chi-square_2k distributed around the common level;
        # a loose 5-sigma band on the normalized spread
        level = row_power.mean()
        sigma = level / math.sqrt(matrix.n_pulses)
        assert np.all(np.abs(row_power - level) < 5.2 * sigma)

    def test_binary_roundtrip(self, radar, panel101, ledger, wave, tmp_path):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=4)
        scene = grid_scene(bin_index=10)
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                seed=3)
        path = tmp_path / "dwell.risd"
        write_data_matrix(path, result.data_matrix)
        data, header = read_data_matrix(path)
        assert np.array_equal(data, result.data_matrix.data)
        assert header["rows"] == result.data_matrix.rows
        assert header["pri"] == plan.pri
        assert header["sample_rate"] == wave.sample_rate
        raw = path.read_bytes()
        assert raw[:4] == b"RISD"

    def test_sampler_reuse_matches_single_shot(self, wave, plan, radar):
        total = int(round(dwell_duration(plan, wave) * wave.sample_rate))
        noisy = add_noise(np.zeros(total, dtype=complex), radar,
                          wave.sample_rate, seed=1, pri=plan.pri)
        compressed = pulse_compress(noisy, wave)
        direct = build_data_matrix(compressed, plan, 0.0, wave.bandwidth,
                                   wave.sample_rate)
        sampler = DataMatrixSampler(plan, 0.0, wave.bandwidth,
                                    wave.sample_rate, total)
        assert np.array_equal(sampler.sample(compressed).data, direct.data)


class TestRangeDoppler:
    def test_static_target_zero_doppler_bin(self, radar, panel101, ledger, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=16)
        scene = grid_scene(bin_index=25)
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                noise=False)
        peak = np.unravel_index(np.argmax(result.rd_map), result.rd_map.shape)
        assert peak == (25, 0)

    def test_on_grid_doppler_bin(self, radar, panel101, ledger, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=16)
        scene = grid_scene(bin_index=25)
        k = 3
        v_r = (k / plan.n_pulses) / plan.pri * radar.lambda0 / 2.0
        velocity = v_r * (scene.ris_position - scene.target_position) / scene.r2
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                targets=[TargetSpec(position=scene.target_position,
                                                    velocity=tuple(velocity),
                                                    rcs=MICRO_UAV_RCS)],
                                noise=False)
        peak = np.unravel_index(np.argmax(result.rd_map), result.rd_map.shape)
        assert peak == (25, k)

    def test_coherent_gain_is_pulse_count(self, radar, panel101, ledger, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=16)
        scene = grid_scene(bin_index=25)
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                noise=False)
        truth = result.truths[0]
        peak_amp = math.sqrt(result.rd_map.max())
        assert peak_amp == pytest.approx(plan.n_pulses * abs(truth.amplitude),
                                         rel=0.05)

    def test_stop_and_hop_phase_law(self, radar, panel101, ledger, wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=8)
        scene = grid_scene(bin_index=25)
        nu = 0.1321
        v_r = nu / plan.pri * radar.lambda0 / 2.0
        velocity = v_r * (scene.ris_position - scene.target_position) / scene.r2
        result = simulate_dwell(scene, radar, panel101,
                                scene.radar_in_ris_frame,
                                scene.target_in_ris_frame, ledger, plan, wave,
                                targets=[TargetSpec(position=scene.target_position,
                                                    velocity=tuple(velocity),
                                                    rcs=MICRO_UAV_RCS)],
                                noise=False)
        row = result.data_matrix.data[25, :]
        steps = np.angle(row[1:] / row[:-1])
        assert np.allclose(steps, 2 * math.pi * nu, atol=1e-3)


class TestResolutionReport:
    def test_range_resolution(self):
        dr, _ = resolution_report(10e6, 128, 66.713e-6)
        assert dr == pytest.approx(SPEED_OF_LIGHT / 2e7, rel=1e-15)
        assert dr == pytest.approx(15.0, rel=0.005)

    def test_doppler_resolution(self):
        _, dfd = resolution_report(10e6, 128, 66.713e-6)
        assert dfd == pytest.approx(1.0 / (128 * 66.713e-6), rel=1e-15)
        assert dfd == pytest.approx(117.1, abs=0.1)


class TestDeterminism:
    def test_identical_seeds_identical_matrices(self, radar, panel101, ledger,
                                                wave):
        plan = build_dwell_plan(tau=1.5e-6, r1=1000.0, r_ua=3e3, n_pulses=8)
        scene = grid_scene(bin_index=25)
        runs = [simulate_dwell(scene, radar, panel101,
                               scene.radar_in_ris_frame,
                               scene.target_in_ris_frame, ledger, plan, wave,
                               seed=99, parallel=flag)
                for flag in (False, True, False)]
        assert np.array_equal(runs[0].data_matrix.data, runs[1].data_matrix.data)
        assert np.array_equal(runs[0].data_matrix.data, runs[2].data_matrix.data)
