"""PRI and dwell arithmetic plus the shadow-sector scan schedule.

Two PRI conventions are carried side by side: "turnaround" counts the full
cycle 2*R_ua/c + 2*r1/c before the next pulse, while "listening" takes the
PRI as the bare listening time 2*R_ua/c (the convention that reproduces a
66.71 us PRT for a 10 km unambiguous range).  The listening convention
lets far returns overlap the next transmission; the plan records that
rather than failing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .constants import SPEED_OF_LIGHT
from .geometry import RisPanel
from .pattern import AngularSector, BeamGrid, tile_sector

PRI_TURNAROUND = "turnaround"   # next pulse after idle + listening
PRI_LISTENING = "listening"     # PRI equals the listening time alone

_CONVENTIONS = (PRI_TURNAROUND, PRI_LISTENING)

SUB_REGION_1 = "sub-region-1"
SUB_REGION_2 = "sub-region-2"


class PulseOverlapError(ValueError):
    """The pulse has not cleared before the first panel return arrives."""


def pri_from_unambiguous_range(r_ua: float, r1: float = 0.0,
                               convention: str = PRI_LISTENING) -> float:
    """PRI for a maximum unambiguous range past the panel."""
    if r_ua < 0 or r1 < 0:
        raise ValueError("ranges must be non-negative")
    if convention == PRI_TURNAROUND:
        return 2.0 * (r_ua + r1) / SPEED_OF_LIGHT
    if convention == PRI_LISTENING:
        return 2.0 * r_ua / SPEED_OF_LIGHT
    raise ValueError(f"unknown PRI convention {convention!r}")


def unambiguous_range_from_pri(pri: float, r1: float = 0.0,
                               convention: str = PRI_LISTENING) -> float:
    """Inverse of pri_from_unambiguous_range."""
    if pri < 0 or r1 < 0:
        raise ValueError("inputs must be non-negative")
    if convention == PRI_TURNAROUND:
        return SPEED_OF_LIGHT * pri / 2.0 - r1
    if convention == PRI_LISTENING:
        return SPEED_OF_LIGHT * pri / 2.0
    raise ValueError(f"unknown PRI convention {convention!r}")


def dwell_time(n_pulses: int, pri: float) -> float:
    """Total coherent observation time n_pulses * PRI."""
    if n_pulses < 1:
        raise ValueError("pulse count must be >= 1")
    if pri <= 0:
        raise ValueError("PRI must be positive")
    return n_pulses * pri


@dataclass(frozen=True)
class DwellPlan:
    """Per-beam burst timing: transmit, idle and listening windows.

    Windows are expressed relative to each pulse start: transmit [0, tau],
    idle [tau, 2*r1/c] while the pulse travels to the panel and back, then
    listening for 2*R_ua/c.
    """

    tau: float
    r1: float
    unambiguous_range: float
    n_pulses: int
    convention: str = PRI_LISTENING
    pri: float = field(init=False)
    dwell: float = field(init=False)
    idle_window: Tuple[float, float] = field(init=False)
    listening_window: Tuple[float, float] = field(init=False)

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("pulse length must be positive")
        if self.unambiguous_range <= 0:
            raise ValueError("unambiguous range must be positive")
        if self.convention not in _CONVENTIONS:
            raise ValueError(f"unknown PRI convention {self.convention!r}")
        first_return = 2.0 * self.r1 / SPEED_OF_LIGHT
        if self.tau >= first_return:
            raise PulseOverlapError(
                f"pulse of {self.tau * 1e6:.3f} us has not cleared before the "
                f"first panel return at {first_return * 1e6:.3f} us; "
                "the panel is too close")
        if self.n_pulses < 1:
            raise ValueError("pulse count must be >= 1")
        pri = pri_from_unambiguous_range(self.unambiguous_range, self.r1,
                                         self.convention)
        object.__setattr__(self, "pri", pri)
        object.__setattr__(self, "dwell", dwell_time(self.n_pulses, pri))
        listen = (first_return,
                  first_return + 2.0 * self.unambiguous_range / SPEED_OF_LIGHT)
        object.__setattr__(self, "idle_window", (self.tau, first_return))
        object.__setattr__(self, "listening_window", listen)

    @property
    def listening_overlaps_next_pulse(self) -> bool:
        """True when far returns are still arriving as the next pulse starts."""
        return self.listening_window[1] > self.pri + 1e-15

    def pulse_events(self):
        """(pulse index, event name, absolute start, absolute end) rows."""
        rows = []
        for i in range(self.n_pulses):
            t0 = i * self.pri
            rows.append((i, "transmit", t0, t0 + self.tau))
            rows.append((i, "idle", t0 + self.idle_window[0], t0 + self.idle_window[1]))
            rows.append((i, "listen", t0 + self.listening_window[0],
                         t0 + self.listening_window[1]))
        return rows


def build_dwell_plan(tau: float, r1: float, r_ua: float, n_pulses: int,
                     convention: str = PRI_LISTENING) -> DwellPlan:
    """Construct and validate a dwell plan for one beam."""
    return DwellPlan(tau=tau, r1=r1, unambiguous_range=r_ua,
                     n_pulses=n_pulses, convention=convention)


@dataclass(frozen=True)
class ScheduledBeam:
    index: int
    mode: str
    start_time: float
    duration: float
    pointing: Optional[Tuple[float, float]] = None
    dwell_plan: Optional[DwellPlan] = None


@dataclass(frozen=True)
class ScanSchedule:
    """Ordered beam sequence covering a shadow sector, with frame timing."""

    beams: Tuple[ScheduledBeam, ...]
    frame_time: float
    grid: BeamGrid

    @property
    def beam_count(self) -> int:
        return sum(1 for b in self.beams if b.mode == SUB_REGION_2)


def build_scan_schedule(sector: AngularSector, panel: RisPanel, lambda0: float,
                        max_edge_loss: float, tau: float, r1: float,
                        r_ua: float, n_pulses: int,
                        convention: str = PRI_LISTENING,
                        direct_block: Optional[float] = None,
                        direct_every: int = 0) -> ScanSchedule:
    """Tile the sector and assign one dwell per beam.

    direct_block/direct_every optionally interleave opaque direct-coverage
    dwells of the given duration after every direct_every shadow beams
    (round-robin duty sharing with the conventional mode).
    """
    grid = tile_sector(sector, panel, lambda0, max_edge_loss)
    plan = build_dwell_plan(tau, r1, r_ua, n_pulses, convention)
    beams = []
    clock = 0.0
    since_direct = 0
    for i, beam in enumerate(grid.beams):
        beams.append(ScheduledBeam(index=len(beams), mode=SUB_REGION_2,
                                   start_time=clock, duration=plan.dwell,
                                   pointing=(beam.theta2, beam.phi2),
                                   dwell_plan=plan))
        clock += plan.dwell
        since_direct += 1
        if direct_block and direct_every and since_direct >= direct_every \
                and i < len(grid.beams) - 1:
            beams.append(ScheduledBeam(index=len(beams), mode=SUB_REGION_1,
                                       start_time=clock, duration=direct_block))
            clock += direct_block
            since_direct = 0
    return ScanSchedule(beams=tuple(beams), frame_time=clock, grid=grid)
