import math

import numpy as np
import pytest

from risradar import (AngularSector, PatternOffsets, RisPanel,
                      analytic_broadside_beamwidths, audit_sector_coverage,
                      beamwidths, induced_pattern_closed_form,
                      induced_pattern_direct, offsets_from_angles,
                      patch_pattern, pattern_to_db, phase_matched_program,
                      scanning_loss, steering_matrix, tile_sector)

from conftest import LAMBDA0, make_panel


def matched_setup(panel, radar_dir, target_dir, pointing1, pointing2):
    program = phase_matched_program(pointing1, pointing2, panel, LAMBDA0)
    s1 = steering_matrix(panel, *radar_dir, LAMBDA0)
    s2 = steering_matrix(panel, *target_dir, LAMBDA0)
    return s1, program, s2


class TestInducedPatternDirect:
    def test_matched_attains_bound(self, panel101):
        d = (math.radians(30.0), math.radians(20.0))
        s1, program, s2 = matched_setup(panel101, d, (0.0, 0.0), d, (0.0, 0.0))
        value = induced_pattern_direct(s1, program, s2)
        assert value == pytest.approx((panel101.n * panel101.m) ** 4, rel=1e-12)

    def test_zero_program(self, panel101):
        s1 = steering_matrix(panel101, 0.1, 0.2, LAMBDA0)
        assert induced_pattern_direct(s1, np.zeros_like(s1), s1) == 0.0

    def test_direct_matches_closed_form(self, panel101):
        pointing1 = (math.radians(30.0), math.radians(20.0))
        pointing2 = (math.radians(10.0), math.radians(20.0))
        radar_dir = (math.radians(32.0), math.radians(17.0))
        target_dir = (math.radians(12.5), math.radians(24.0))
        s1, program, s2 = matched_setup(panel101, radar_dir, target_dir,
                                        pointing1, pointing2)
        direct = induced_pattern_direct(s1, program, s2)
        offs = offsets_from_angles(radar_dir, target_dir, pointing1, pointing2,
                                   panel101, LAMBDA0)
        closed = induced_pattern_closed_form(offs, panel101.n, panel101.m)
        assert direct == pytest.approx(closed, rel=1e-9)


class TestClosedForm:
    def test_peak_value(self):
        assert induced_pattern_closed_form(PatternOffsets(0.0, 0.0), 101, 101) \
            == pytest.approx(101.0 ** 8, rel=1e-15)

    def test_first_null(self):
        value = induced_pattern_closed_form(PatternOffsets(1.0 / 101, 0.0), 101, 101)
        assert value / 101.0 ** 8 < 1e-20

    def test_geometric_series_oracle(self):
        n, dk = 101, 0.0123
        series = sum(np.exp(2j * np.pi * dk * k) for k in range(n))
        expected = abs(series) ** 4
        value = induced_pattern_closed_form(PatternOffsets(dk, 0.0), n, 1)
        assert value == pytest.approx(expected, rel=1e-10)

    def test_periodicity(self):
        for dk in (0.013, 0.377, 0.5001):
            a = induced_pattern_closed_form(PatternOffsets(dk, 0.0), 101, 101)
            b = induced_pattern_closed_form(PatternOffsets(dk + 1.0, 0.0), 101, 101)
            assert a == pytest.approx(b, rel=1e-9)

    def test_sidelobe_count_per_period(self):
        n = 11
        x = np.linspace(1.0 / n, 1.0 - 1.0 / n, 20001)
        values = np.array([induced_pattern_closed_form(PatternOffsets(xi, 0.0), n, 1)
                           for xi in x])
        interior = (values[1:-1] > values[:-2]) & (values[1:-1] >= values[2:])
        assert int(interior.sum()) == n - 2

    def test_peak_location_at_pointing(self, panel101):
        pointing1 = (math.radians(30.0), math.radians(20.0))
        pointing2 = (math.radians(10.0), math.radians(20.0))
        best = None
        for th in np.linspace(math.radians(8.0), math.radians(12.0), 41):
            for ph in np.linspace(math.radians(16.0), math.radians(24.0), 41):
                offs = offsets_from_angles(pointing1, (th, ph), pointing1,
                                           pointing2, panel101, LAMBDA0)
                val = induced_pattern_closed_form(offs, panel101.n, panel101.m)
                if best is None or val > best[0]:
                    best = (val, th, ph)
        assert best[1] == pytest.approx(pointing2[0], abs=math.radians(0.11))
        assert best[2] == pytest.approx(pointing2[1], abs=math.radians(0.21))
        assert best[0] <= (panel101.n * panel101.m) ** 4 * (1 + 1e-12)


class TestOffsets:
    def test_all_matched_zero(self, panel101):
        d1 = (0.3, 0.4)
        d2 = (0.1, -0.2)
        offs = offsets_from_angles(d1, d2, d1, d2, panel101, LAMBDA0)
        assert offs.delta_ku == 0.0 and offs.delta_kv == 0.0

    def test_single_bracket(self, panel101):
        d1 = (0.3, 0.4)
        pointing2 = (0.1, -0.2)
        target = (0.15, -0.2)
        offs = offsets_from_angles(d1, target, d1, pointing2, panel101, LAMBDA0)
        du = math.sin(0.15) * math.cos(-0.2) - math.sin(0.1) * math.cos(-0.2)
        assert offs.delta_ku == pytest.approx((panel101.dx / LAMBDA0) * du, rel=1e-12)

    def test_steered_pointing_finite(self, panel101):
        pointing2 = (math.radians(10.0), math.radians(20.0))
        offs = offsets_from_angles((0.5, 0.3), (0.0, 0.0), (0.5, 0.3), pointing2,
                                   panel101, LAMBDA0)
        assert math.isfinite(offs.delta_ku) and math.isfinite(offs.delta_kv)
        assert offs.delta_ku != 0.0


class TestBeamwidths:
    @pytest.mark.parametrize("count", [101, 133, 201])
    def test_broadside_matches_textbook_constant(self, count):
        panel = make_panel(count)
        phi_bar, theta_bar = beamwidths(panel, LAMBDA0)
        expected = 0.891 / count
        assert phi_bar == pytest.approx(expected, rel=0.02)
        assert theta_bar == pytest.approx(expected, rel=0.02)

    def test_analytic_values(self, panel101):
        phi_bar, theta_bar = analytic_broadside_beamwidths(panel101)
        assert phi_bar == pytest.approx(0.891 / 101)
        assert phi_bar == pytest.approx(8.822e-3, abs=5e-6)
        assert theta_bar == pytest.approx(0.891 / 101)

    def test_steering_broadens(self, panel101):
        broadside = beamwidths(panel101, LAMBDA0)[0]
        steered = beamwidths(panel101, LAMBDA0, (math.radians(45.0), 0.0))[0]
        assert steered > broadside
        # small-angle factor ~ 1/cos(45 deg)
        assert steered == pytest.approx(broadside / math.cos(math.radians(45.0)),
                                        rel=0.02)

    def test_monotone_narrowing(self):
        widths = [beamwidths(make_panel(c), LAMBDA0)[0] for c in (101, 133, 201)]
        assert widths[0] > widths[1] > widths[2]


class TestPatchPattern:
    def test_boresight(self):
        assert patch_pattern(0.0, 1.5) == 1.0

    def test_horizon(self):
        assert patch_pattern(math.pi / 2, 1.5) == pytest.approx(0.0, abs=1e-15)

    def test_known_value(self):
        assert patch_pattern(math.radians(45.0), 1.5) == pytest.approx(0.5946, abs=5e-5)

    def test_outside_range_is_zero(self):
        assert patch_pattern(math.pi / 2 + 0.2, 1.5) == 0.0

    def test_array_input(self):
        out = patch_pattern(np.array([0.0, math.pi / 2 + 0.1]), 2.0)
        assert out[0] == 1.0 and out[1] == 0.0


class TestScanningLoss:
    def test_boresight_zero(self):
        assert scanning_loss(0.0, 1.5) == 0.0

    def test_forty_five_degrees(self):
        assert scanning_loss(math.radians(45.0), 1.5) == pytest.approx(4.52, abs=0.01)

    def test_twenty_degrees_negligible(self):
        loss = scanning_loss(math.radians(20.0), 1.5)
        assert loss <= 0.85  # rounds to the quoted 0.8 dB

    def test_endfire_infinite(self):
        assert scanning_loss(math.pi / 2, 1.5) == math.inf


class TestPatternDb:
    def test_peak_is_zero_db(self):
        assert pattern_to_db(101.0 ** 8, 101, 101) == pytest.approx(0.0, abs=1e-12)

    def test_zero_is_minus_inf(self):
        assert pattern_to_db(0.0, 101, 101) == -math.inf


class TestTileSector:
    def test_single_point_single_beam(self, panel101):
        sector = AngularSector(0.1, 0.1, 0.2, 0.2)
        grid = tile_sector(sector, panel101, LAMBDA0, max_edge_loss=3.0)
        assert grid.count == 1
        assert audit_sector_coverage(grid, sector, panel101, LAMBDA0) \
            == pytest.approx(0.0, abs=1e-9)

    def test_two_widths_need_two_beams(self, panel101):
        width12 = beamwidths(panel101, LAMBDA0)[0]
        # theta-interval along phi = 0 whose u-extent is two 12 dB widths
        theta_hi = math.asin(2.0 * width12)
        sector = AngularSector(0.0, theta_hi, 0.0, 0.0)
        grid = tile_sector(sector, panel101, LAMBDA0, max_edge_loss=12.0)
        assert grid.count >= 2

    def test_sector_beyond_endfire_rejected(self):
        with pytest.raises(ValueError):
            AngularSector(0.0, math.pi / 2 + 0.01, 0.0, 0.1)

    def test_audited_coverage_30x30(self, panel101):
        sector = AngularSector(0.0, math.radians(30.0),
                               math.radians(-15.0), math.radians(15.0))
        grid = tile_sector(sector, panel101, LAMBDA0, max_edge_loss=3.0)
        worst = audit_sector_coverage(grid, sector, panel101, LAMBDA0,
                                      resolution=41)
        assert worst <= 3.0
        assert grid.count >= 1
        for beam in grid.beams:
            assert beam.edge_loss_db <= 3.0 + 1e-9


class TestClosedVsDirectRandomized:
    def test_equivalence_theorem(self):
        rng = np.random.default_rng(20260810)
        for count in (5, 101):
            panel = make_panel(count)
            for _ in range(100):
                p1 = (rng.uniform(0, math.pi / 3), rng.uniform(-math.pi, math.pi))
                p2 = (rng.uniform(0, math.pi / 3), rng.uniform(-math.pi, math.pi))
                radar_dir = (rng.uniform(0, math.pi / 3),
                             rng.uniform(-math.pi, math.pi))
                target_dir = (rng.uniform(0, math.pi / 3),
                              rng.uniform(-math.pi, math.pi))
                s1, program, s2 = matched_setup(panel, radar_dir, target_dir, p1, p2)
                direct = induced_pattern_direct(s1, program, s2)
                offs = offsets_from_angles(radar_dir, target_dir, p1, p2,
                                           panel, LAMBDA0)
                closed = induced_pattern_closed_form(offs, panel.n, panel.m)
                if closed > 1e-12:
                    assert direct == pytest.approx(closed, rel=1e-9)
                else:
                    assert direct < 1e-6
