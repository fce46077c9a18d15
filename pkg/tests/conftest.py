"""Shared reference-scenario fixtures (values of the published sizing table)."""

import math

import numpy as np
import pytest

from risradar import LossLedger, RadarSystem, RisPanel, scene_from_ris_angles

F0 = 10e9
LAMBDA0 = 299792458.0 / F0
MICRO_UAV_RCS = 0.02


def db(x):
    return 10.0 ** (x / 10.0)


@pytest.fixture
def radar():
    return RadarSystem(peak_power=db(26.0), tx_gain=db(38.0), f0=F0,
                       bandwidth=10e6, tau=1.5e-6, noise_figure=db(2.5))


@pytest.fixture
def ledger():
    # 6 dB total system loss carried on the transmit slot
    return LossLedger(l_t=db(6.0))


def make_panel(count):
    return RisPanel(n=count, m=count, dx=LAMBDA0 / 2, dy=LAMBDA0 / 2,
                    eta=0.8, gain=db(4.0), patch_exponent=1.5)


@pytest.fixture
def panel101():
    return make_panel(101)


@pytest.fixture
def panel133():
    return make_panel(133)


@pytest.fixture
def panel201():
    return make_panel(201)


def make_scene(r1=1000.0, radar_theta=30.0, radar_phi=20.0,
               r2=1500.0, target_theta=0.0, target_phi=0.0):
    return scene_from_ris_angles(
        r1=r1, radar_theta=math.radians(radar_theta),
        radar_phi=math.radians(radar_phi),
        r2=r2, target_theta=math.radians(target_theta),
        target_phi=math.radians(target_phi))


@pytest.fixture
def scene():
    return make_scene()
