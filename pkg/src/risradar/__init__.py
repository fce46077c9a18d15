"""Numerical engine for panel-assisted radar coverage of shadowed sectors.

Subpackages follow the processing chain: geometry and the programmed
reflection, the induced two-way pattern, the augmented range equation,
clutter ratios, detection probabilities, the scan timeline, and the
signal-level dwell simulator with range-Doppler processing.
"""

__version__ = "0.1.0"

from .clutter import (ClutterEnvironment, clutter_power_surface,
                      clutter_power_volume, clutter_regime,
                      illuminated_area_beam_limited,
                      illuminated_area_pulse_limited, illuminated_volume,
                      scr_beamwidth_limited, scr_pulse_length_limited,
                      scr_volume)
from .config import ConfigError, ScenarioConfig, default_config, load_config, parse_config
from .constants import BOLTZMANN, SPEED_OF_LIGHT, T0_KELVIN
from .detection import (SW0, SW1, DetectionSpec, NoDetectionRange,
                        detection_probability, marcum_q1, matched_sigma,
                        max_range_for_pd, pd_sw0, pd_sw1)
from .echo_sim import (DataMatrix, DataMatrixSampler, DopplerAmbiguityWarning,
                       SimulationResult, TargetSpec, TargetTruth,
                       TruncatedEchoWarning, add_noise, bandlimited_sample,
                       build_data_matrix, dwell_duration,
                       noise_power_per_sample, range_doppler_map,
                       read_data_matrix, resolution_report, simulate_dwell,
                       synthesize_target_echo, target_truth,
                       write_data_matrix)
from .geometry import (DirectionalCosines, ReflectionProgram, RisPanel,
                       SceneGeometry, direction_vector, directional_cosines,
                       manifold_vectors, orthonormal_frame,
                       phase_matched_program, scene_from_ris_angles,
                       sigma_matrix, steering_matrix)
from .link_budget import (EquivalentMonostatic, FarFieldWarning, LossLedger,
                          RadarSystem, check_far_field, equivalent_monostatic,
                          far_field_distance, monostatic_snr,
                          pattern_product, power_density_at_target,
                          received_power, snr_average_power_form,
                          snr_coherent, snr_loss_vs_clairvoyant,
                          snr_single_pulse, summed_reflection)
from .pattern import (AngularSector, BeamGrid, PatternOffsets, TiledBeam,
                      analytic_broadside_beamwidths, audit_sector_coverage,
                      beamwidths, induced_pattern_closed_form,
                      induced_pattern_direct, offsets_from_angles,
                      patch_pattern, pattern_to_db, scanning_loss,
                      tile_sector)
from .timeline import (PRI_LISTENING, PRI_TURNAROUND, DwellPlan,
                       PulseOverlapError, ScanSchedule, ScheduledBeam,
                       build_dwell_plan, build_scan_schedule, dwell_time,
                       pri_from_unambiguous_range, unambiguous_range_from_pri)
from .waveform import (LFM, RECT, PulseWaveform, ambiguity_function,
                       generate_burst, pulse_compress)
