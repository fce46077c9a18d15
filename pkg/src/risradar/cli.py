"""Command-line front end: subcommand dispatch and artifact emission.

Exit codes: 0 on success, 2 for configuration errors, 3 for numeric or
validation failures (including a failed reproduction check in `report`).
The output directory comes from --output-dir, the RISRADAR_OUTPUT_DIR
environment variable, or the current directory, in that order.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__
from .clutter import (clutter_power_surface, clutter_regime,
                      scr_beamwidth_limited, scr_pulse_length_limited, scr_volume)
from .config import ConfigError, ScenarioConfig, default_config, load_config
from .constants import SPEED_OF_LIGHT
from .detection import matched_sigma, pd_sw0, pd_sw1
from .echo_sim import TargetSpec, simulate_dwell, write_data_matrix
from .geometry import RisPanel, steering_matrix, sigma_matrix, phase_matched_program
from .link_budget import (FarFieldWarning, far_field_distance, snr_coherent,
                          snr_loss_vs_clairvoyant, snr_single_pulse,
                          snr_average_power_form, equivalent_monostatic)
from .output import write_csv, write_json
from .pattern import (analytic_broadside_beamwidths, beamwidths,
                      induced_pattern_closed_form, offsets_from_angles,
                      pattern_to_db, scanning_loss)
from .timeline import build_scan_schedule, dwell_time, pri_from_unambiguous_range

_ENV_OUTPUT_DIR = "RISRADAR_OUTPUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _provenance(config: ScenarioConfig, seed=None) -> Dict[str, str]:
    prov = {"config_sha256": config.sha256(), "version": __version__,
            "units": "SI, angles in degrees, dB where suffixed"}
    if seed is not None:
        prov["seed"] = str(seed)
    return prov


def _sweep_values(config: ScenarioConfig, override: Optional[str]) -> Tuple[str, np.ndarray]:
    if override:
        try:
            variable, spec = override.split("=", 1)
            start, stop, step = (float(tok) for tok in spec.split(":"))
        except ValueError:
            raise ConfigError(
                f"--sweep expects VAR=START:STOP:STEP, got {override!r}") from None
        if variable not in ("r2", "n_pulses", "n"):
            raise ConfigError(f"unknown sweep variable {variable!r}")
    else:
        variable = config.get("sweep", "variable")
        start = config.get("sweep", "start")
        stop = config.get("sweep", "stop")
        step = config.get("sweep", "step")
    if step <= 0 or stop < start:
        raise ConfigError("sweep must have step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return variable, start + step * np.arange(count)


def _matched_chain_snr(config: ScenarioConfig, r2: float, n_pulses: int,
                       panel: Optional[RisPanel] = None) -> Tuple[float, bool]:
    """Coherent SNR (linear) with the config pointings, plus an FFD flag."""
    radar = config.build_radar()
    if panel is None:
        panel = config.build_panel()
    scene = config.build_scene().with_target_range(r2)
    ledger = config.build_ledger()
    lambda0 = radar.lambda0
    program = phase_matched_program(config.pointing1(), config.pointing2(),
                                    panel, lambda0)
    s1 = steering_matrix(panel, *scene.radar_in_ris_frame, lambda0)
    s2 = steering_matrix(panel, *scene.target_in_ris_frame, lambda0)
    sig = sigma_matrix(s1, program, s2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FarFieldWarning)
        snr1 = snr_single_pulse(radar, panel, scene, sig,
                                config.get("scene", "rcs"))
    below_ffd = min(scene.r1, scene.r2) < far_field_distance(panel, lambda0)
    return snr_coherent(snr1, n_pulses, ledger), below_ffd


def run_pattern(config: ScenarioConfig, outdir: str) -> List[str]:
    """Normalized two-way pattern over target angles, CSV grid."""
    radar = config.build_radar()
    panel = config.build_panel()
    lambda0 = radar.lambda0
    p1 = config.pointing1()
    p2 = config.pointing2()
    rows = []
    for theta_deg in np.linspace(0.0, 30.0, 61):
        for phi_deg in np.linspace(-180.0, 180.0, 121):
            offs = offsets_from_angles(p1, (math.radians(theta_deg),
                                            math.radians(phi_deg)),
                                       p1, p2, panel, lambda0)
            value = induced_pattern_closed_form(offs, panel.n, panel.m)
            rows.append((theta_deg, phi_deg,
                         pattern_to_db(value, panel.n, panel.m)))
    path = os.path.join(outdir, "pattern_grid.csv")
    write_csv(path, ["target_theta_deg", "target_phi_deg", "pattern_db"],
              rows, _provenance(config))
    return [path]


def run_snr(config: ScenarioConfig, outdir: str,
            sweep: Optional[str] = None) -> List[str]:
    """SNR sweep CSV over r2, pulse count or panel size."""
    variable, values = _sweep_values(config, sweep)
    n_pulses = config.get("timeline", "n_pulses")
    r2_default = config.get("scene", "r2")
    rows = []
    for value in values:
        if variable == "r2":
            snr, flag = _matched_chain_snr(config, float(value), n_pulses)
        elif variable == "n_pulses":
            snr, flag = _matched_chain_snr(config, r2_default, int(round(value)))
        else:  # panel size sweep, square panel
            count = int(round(value))
            base = config.build_panel()
            panel = RisPanel(n=count, m=count, dx=base.dx, dy=base.dy,
                             eta=base.eta, gain=base.gain,
                             patch_exponent=base.patch_exponent)
            snr, flag = _matched_chain_snr(config, r2_default, n_pulses, panel)
        rows.append((float(value), 10.0 * math.log10(snr), flag))
    path = os.path.join(outdir, f"snr_vs_{variable}.csv")
    write_csv(path, [f"{variable}", "snr_db", "below_ffd"], rows,
              _provenance(config))
    return [path]


def run_pd(config: ScenarioConfig, outdir: str,
           sweep: Optional[str] = None) -> List[str]:
    """Detection probability sweep over r2 for both fluctuation models."""
    variable, values = _sweep_values(config, sweep)
    if variable != "r2":
        raise ConfigError("pd sweeps only support the r2 variable")
    n_pulses = config.get("timeline", "n_pulses")
    pfa = config.get("detection", "pfa")
    rows = []
    for r2 in values:
        snr, _ = _matched_chain_snr(config, float(r2), n_pulses)
        rows.append((float(r2), pd_sw0(snr, pfa), pd_sw1(snr, pfa)))
    path = os.path.join(outdir, "pd_vs_r2.csv")
    write_csv(path, ["r2_m", "pd_sw0", "pd_sw1"], rows, _provenance(config))
    return [path]


def run_scr(config: ScenarioConfig, outdir: str,
            sweep: Optional[str] = None) -> List[str]:
    """Signal-to-clutter sweep over r2 with regime auto-detection."""
    variable, values = _sweep_values(config, sweep)
    if variable != "r2":
        raise ConfigError("scr sweeps only support the r2 variable")
    radar = config.build_radar()
    panel = config.build_panel()
    env = config.build_clutter_env()
    rcs = config.get("scene", "rcs")
    phi_bar, theta_bar = beamwidths(panel, radar.lambda0, config.pointing2())

    def as_db(x):
        return math.inf if x == math.inf else 10.0 * math.log10(x)

    rows = []
    for r2 in values:
        r2 = float(r2)
        regime = clutter_regime(r2, radar.tau, phi_bar, env.grazing_angle)
        rows.append((
            r2,
            as_db(scr_pulse_length_limited(rcs, env, r2, radar.tau, phi_bar)),
            as_db(scr_beamwidth_limited(rcs, env, r2, phi_bar)),
            as_db(scr_volume(rcs, env, r2, radar.tau, phi_bar, theta_bar)),
            regime,
        ))
    path = os.path.join(outdir, "scr_vs_r2.csv")
    write_csv(path, ["r2_m", "scr_pulse_limited_db", "scr_beam_limited_db",
                     "scr_volume_db", "auto_regime"], rows, _provenance(config))
    return [path]


def run_timeline(config: ScenarioConfig, outdir: str) -> List[str]:
    """Per-pulse event table and per-beam scan summary."""
    plan = config.build_dwell_plan()
    radar = config.build_radar()
    panel = config.build_panel()
    events = [(idx, name, start, end) for idx, name, start, end in plan.pulse_events()]
    events_path = os.path.join(outdir, "dwell_events.csv")
    write_csv(events_path, ["pulse_index", "event", "t_start_s", "t_end_s"],
              events, _provenance(config))

    schedule = build_scan_schedule(
        config.build_sector(), panel, radar.lambda0,
        config.get("timeline", "max_edge_loss_db"),
        tau=radar.tau, r1=config.get("scene", "r1"),
        r_ua=config.get("timeline", "unambiguous_range"),
        n_pulses=config.get("timeline", "n_pulses"),
        convention=config.get("timeline", "pri_convention"))
    beam_rows = []
    for beam in schedule.beams:
        theta = math.degrees(beam.pointing[0]) if beam.pointing else ""
        phi = math.degrees(beam.pointing[1]) if beam.pointing else ""
        beam_rows.append((beam.index, beam.mode, theta, phi,
                          beam.start_time, beam.duration))
    beams_path = os.path.join(outdir, "scan_schedule.csv")
    prov = _provenance(config)
    prov["frame_time_s"] = repr(schedule.frame_time)
    write_csv(beams_path, ["beam_index", "mode", "theta2_deg", "phi2_deg",
                           "t_start_s", "duration_s"], beam_rows, prov)
    return [events_path, beams_path]


def run_simulate(config: ScenarioConfig, outdir: str,
                 seed: Optional[int] = None,
                 parallel: Optional[bool] = None) -> List[str]:
    """Full dwell simulation: binary data matrix, map CSV and truth sidecar."""
    if seed is None:
        seed = config.get("simulation", "seed")
    if parallel is None:
        parallel = config.get("simulation", "parallel")
    radar = config.build_radar()
    panel = config.build_panel()
    scene = config.build_scene()
    ledger = config.build_ledger()
    plan = config.build_dwell_plan()
    waveform = config.build_waveform()

    clutter = None
    if config.get("simulation", "clutter_enabled"):
        env = config.build_clutter_env()
        phi_bar, _ = beamwidths(panel, radar.lambda0, config.pointing2())
        program = phase_matched_program(config.pointing1(), config.pointing2(),
                                        panel, radar.lambda0)
        s1 = steering_matrix(panel, *scene.radar_in_ris_frame, radar.lambda0)
        s2 = steering_matrix(panel, *scene.target_in_ris_frame, radar.lambda0)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FarFieldWarning)
            power = clutter_power_surface(radar, panel, scene,
                                          sigma_matrix(s1, program, s2),
                                          env, phi_bar)
        clutter = (scene.r2, power, config.get("simulation", "clutter_scatterers"))

    targets = [TargetSpec(position=scene.target_position,
                          velocity=tuple(config.target_velocity()),
                          rcs=config.get("scene", "rcs"))]
    result = simulate_dwell(
        scene, radar, panel, config.pointing1(), config.pointing2(), ledger,
        plan, waveform, targets=targets,
        r2_min=config.get("simulation", "r2_min"), seed=seed,
        noise=config.get("simulation", "noise"), parallel=parallel,
        clutter=clutter)

    matrix = result.data_matrix
    binary_path = os.path.join(outdir, "data_matrix.risd")
    write_data_matrix(binary_path, matrix)

    map_rows = []
    doppler_step = 1.0 / (matrix.n_pulses * matrix.pri)
    for h in range(matrix.rows):
        r2_bin = matrix.r2_min + h * matrix.range_bin
        for l in range(matrix.n_pulses):
            doppler = l * doppler_step
            if l > matrix.n_pulses // 2:
                doppler -= 1.0 / matrix.pri
            map_rows.append((r2_bin, doppler, float(result.rd_map[h, l])))
    map_path = os.path.join(outdir, "range_doppler_map.csv")
    write_csv(map_path, ["r2_m", "doppler_hz", "power"], map_rows,
              _provenance(config, seed))

    truth_path = os.path.join(outdir, "truth.json")
    write_json(truth_path, {
        "config_sha256": config.sha256(),
        "seed": seed,
        "version": __version__,
        "targets": [
            {
                "position_m": list(t.position),
                "velocity_mps": list(t.velocity),
                "rcs_m2": t.rcs,
                "radial_velocity_mps": t.radial_velocity,
                "doppler_hz": t.doppler,
                "normalized_doppler": t.normalized_doppler,
                "delay_total_s": t.delay_total,
                "amplitude_re": t.amplitude.real,
                "amplitude_im": t.amplitude.imag,
            } for t in result.truths
        ],
    })
    return [binary_path, map_path, truth_path]


def _report_checks(config: ScenarioConfig):
    """(name, value, expected, tolerance, passed) reproduction rows."""
    radar = config.build_radar()
    lambda0 = radar.lambda0
    checks = []

    def add(name, value, expected, tol):
        checks.append((name, value, expected, tol, abs(value - expected) <= tol))

    pri = pri_from_unambiguous_range(10000.0)
    for n_pulses, expected_ms in ((8, 0.53), (16, 1.07), (32, 2.13),
                                  (64, 4.27), (128, 8.54)):
        add(f"dwell_ms_np{n_pulses}", dwell_time(n_pulses, pri) * 1e3,
            expected_ms, 0.01)

    for count, expected in ((101, 152.91), (133, 265.15), (201, 605.60)):
        panel = RisPanel(n=count, m=count, dx=lambda0 / 2, dy=lambda0 / 2)
        add(f"ffd_m_n{count}", far_field_distance(panel, lambda0), expected,
            0.005 * expected)

    for count in (101, 133, 201):
        panel = RisPanel(n=count, m=count, dx=lambda0 / 2, dy=lambda0 / 2)
        numeric = beamwidths(panel, lambda0)[0]
        analytic = analytic_broadside_beamwidths(panel)[0]
        add(f"beamwidth_n{count}", numeric, analytic, 0.02 * analytic)

    add("scan_loss_db_45deg", scanning_loss(math.radians(45.0)), 4.52, 0.01)
    loss20 = scanning_loss(math.radians(20.0))
    checks.append(("scan_loss_db_20deg", loss20, 0.8, 0.05, loss20 <= 0.85))

    gain_db = 10.0 * math.log10(dwell_time(128, pri) / dwell_time(8, pri))
    add("coherent_gain_db_8_to_128", gain_db, 10.0 * math.log10(16.0), 1e-9)
    return checks


def run_report(config: ScenarioConfig, outdir: str) -> Tuple[List[str], bool]:
    """Reference-scenario reproduction manifest plus plot-ready curves."""
    checks = _report_checks(config)
    manifest_path = os.path.join(outdir, "report_manifest.csv")
    rows = [(name, value, expected, tol, "pass" if ok else "FAIL")
            for name, value, expected, tol, ok in checks]
    write_csv(manifest_path, ["check", "value", "expected", "tolerance",
                              "status"], rows, _provenance(config))

    paths = [manifest_path]
    n_pulses_list = (8, 16, 32, 64, 128)
    r2_grid = np.arange(500.0, 3001.0, 50.0)
    for count in (101, 133, 201):
        base = config.build_panel()
        panel = RisPanel(n=count, m=count, dx=base.dx, dy=base.dy, eta=base.eta,
                         gain=base.gain, patch_exponent=base.patch_exponent)
        rows = []
        for r2 in r2_grid:
            snr1, flag = _matched_chain_snr(config, float(r2), 1, panel)
            rows.append((float(r2),
                         *(10.0 * math.log10(snr1 * np_i /
                                             config.build_ledger().total)
                           for np_i in n_pulses_list), flag))
        path = os.path.join(outdir, f"snr_vs_r2_n{count}.csv")
        write_csv(path, ["r2_m"] + [f"snr_db_np{n}" for n in n_pulses_list]
                  + ["below_ffd"], rows, _provenance(config))
        paths.append(path)

        pd_rows = []
        for r2 in r2_grid:
            snr, _ = _matched_chain_snr(config, float(r2),
                                        config.get("timeline", "n_pulses"), panel)
            pd_rows.append((float(r2),
                            pd_sw0(snr, 1e-4), pd_sw0(snr, 1e-6),
                            pd_sw1(snr, 1e-4), pd_sw1(snr, 1e-6)))
        path = os.path.join(outdir, f"pd_vs_r2_n{count}.csv")
        write_csv(path, ["r2_m", "pd_sw0_pfa1e-4", "pd_sw0_pfa1e-6",
                         "pd_sw1_pfa1e-4", "pd_sw1_pfa1e-6"], pd_rows,
                  _provenance(config))
        paths.append(path)

        loss_rows = []
        radar = config.build_radar()
        ledger = config.build_ledger()
        for r2 in r2_grid:
            scene = config.build_scene().with_target_range(float(r2))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", FarFieldWarning)
                sig = matched_sigma(panel, scene, radar.lambda0)
                loss_sum = snr_loss_vs_clairvoyant(
                    radar, panel, scene, sig, config.get("scene", "rcs"),
                    ledger, convention="sum")
                loss_rss = snr_loss_vs_clairvoyant(
                    radar, panel, scene, sig, config.get("scene", "rcs"),
                    ledger, convention="root-sum-square")
            loss_rows.append((float(r2), loss_sum, loss_rss))
        path = os.path.join(outdir, f"snr_loss_vs_r2_n{count}.csv")
        write_csv(path, ["r2_m", "loss_db_total_range", "loss_db_rss_range"],
                  loss_rows, _provenance(config))
        paths.append(path)

    all_pass = all(ok for *_, ok in checks)
    return paths, all_pass


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="risradar",
        description="Sizing, analysis and simulation of a panel-assisted "
                    "radar covering shadowed sectors")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
            ("pattern", "emit the two-way pattern grid CSV"),
            ("snr", "sweep the integrated SNR"),
            ("pd", "sweep detection probability over r2"),
            ("scr", "sweep signal-to-clutter ratios over r2"),
            ("timeline", "emit dwell events and the scan schedule"),
            ("simulate", "run the signal-level dwell simulation"),
            ("report", "run the reference reproduction suite")):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="scenario file (defaults otherwise)")
        p.add_argument("--output-dir", help="artifact directory")
        if name in ("snr", "pd", "scr"):
            p.add_argument("--sweep", help="VAR=START:STOP:STEP override")
        if name == "simulate":
            p.add_argument("--seed", type=int, help="noise seed override")
            p.add_argument("--parallel", action="store_true", default=None,
                           help="synthesize noise segments concurrently")
    args = parser.parse_args(argv)

    outdir = args.output_dir or os.environ.get(_ENV_OUTPUT_DIR) or os.getcwd()
    written: List[str] = []
    try:
        config = load_config(args.config) if args.config else default_config()
        if args.command == "pattern":
            written = run_pattern(config, outdir)
        elif args.command == "snr":
            written = run_snr(config, outdir, args.sweep)
        elif args.command == "pd":
            written = run_pd(config, outdir, args.sweep)
        elif args.command == "scr":
            written = run_scr(config, outdir, args.sweep)
        elif args.command == "timeline":
            written = run_timeline(config, outdir)
        elif args.command == "simulate":
            written = run_simulate(config, outdir, args.seed, args.parallel)
        elif args.command == "report":
            written, all_pass = run_report(config, outdir)
            for path in written:
                print(path)
            if not all_pass:
                print("report: reproduction checks FAILED", file=sys.stderr)
                return EXIT_NUMERIC
            return EXIT_OK
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, RuntimeError, OSError) as err:
        for path in written:
            if os.path.exists(path):
                os.unlink(path)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
