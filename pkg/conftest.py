# conftest.py
import math

import pytest

from src.common import config, parallel
from src.common.data_models import CrystalConfig
from src.physics import dfg


@pytest.fixture(autouse=True)
def _serial_and_silent(monkeypatch):
    """测试默认单线程且不显示进度条"""
    monkeypatch.setattr(config, "MAX_WORKERS", 1)
    monkeypatch.setattr(parallel, "SHOW_PROGRESS", False)


@pytest.fixture
def stry_crystal() -> CrystalConfig:
    """50 mm PPLN，d_eff = (2/π)·27 pm/V·0.85"""
    return CrystalConfig(length=0.05, n_p=2.175, n_s=2.156, n_i=2.085,
                         d_eff=dfg.qpm_effective_d(27e-12, 0.85), alpha=4.0, miller=0.85)


@pytest.fixture
def stry_beams(stry_crystal):
    pump = dfg.gaussian_beam_for_confocal(0.120, 812e-9, stry_crystal.n_p, 0.024, 1.15)
    signal = dfg.gaussian_beam_for_confocal(0.980, 1064e-9, stry_crystal.n_s, 0.024, 1.15)
    return pump, signal


@pytest.fixture
def degenerate_omegas():
    omega_p = 2 * math.pi * 299792458.0 / 400e-9
    return omega_p, omega_p / 2
