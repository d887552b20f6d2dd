import math
from dataclasses import replace

import numpy as np
import pytest

from src.common.data_models import CrystalConfig, GaussianBeam
from src.common.errors import InvalidInput, MismatchedConfocal
from src.physics import dfg, kinematics


def test_confocal_and_focusing_parameter():
    k = kinematics.wavevector_magnitude(1064e-9, 2.156)
    assert dfg.confocal_parameter(k, 50e-6) == pytest.approx(k * 2.5e-9, rel=1e-15)
    assert dfg.focusing_parameter(0.05, 0.024) == pytest.approx(0.05 / 0.024, rel=1e-15)
    with pytest.raises(InvalidInput):
        dfg.confocal_parameter(k, 0.0)


def test_gaussian_beam_for_confocal_round_trip():
    beam = dfg.gaussian_beam_for_confocal(1.0, 812e-9, 2.175, 0.024)
    assert beam.confocal == pytest.approx(0.024, rel=1e-12)


def test_qpm_effective_d():
    assert dfg.qpm_effective_d(27e-12, 0.85) == pytest.approx(2 / math.pi * 27e-12 * 0.85, rel=1e-15)
    with pytest.raises(InvalidInput):
        dfg.qpm_effective_d(-1.0)
    with pytest.raises(InvalidInput):
        dfg.qpm_effective_d(27e-12, 1.5)


@pytest.mark.parametrize("overrides", [
    {"d_eff": -1e-12},
    {"d_eff": 0.0},
    {"miller": 0.0},
    {"miller": 1.2},
])
def test_crystal_config_invariants(overrides):
    params = dict(length=0.05, n_p=2.1, n_s=2.1, n_i=2.1, d_eff=1e-11)
    params.update(overrides)
    with pytest.raises(InvalidInput):
        CrystalConfig(**params)


def test_crystal_config_keeps_miller(stry_crystal):
    assert stry_crystal.miller == 0.85
    assert CrystalConfig(length=0.05, n_p=2.1, n_s=2.1, n_i=2.1, d_eff=1e-11).miller == 1.0


def test_stry_reference_efficiency():
    efficiency = dfg.conversion_efficiency(0.1176e-3, 0.120, 0.980, 0.05)
    assert efficiency == pytest.approx(0.0200, rel=0.03)


def test_stry_focused_power_order_of_magnitude(stry_crystal, stry_beams):
    pump, signal = stry_beams
    power = dfg.dfg_power_focused(pump, signal, stry_crystal, 0.0)
    assert 0.1176e-3 / 3 <= power <= 0.1176e-3 * 3


def test_breakdown_reports_focusing_geometry(stry_crystal, stry_beams):
    pump, signal = stry_beams
    result = dfg.dfg_power_breakdown(pump, signal, stry_crystal, 0.0)
    assert result.confocal == pytest.approx(0.024, rel=1e-12)
    assert result.xi == pytest.approx(0.05 / 0.024, rel=1e-12)
    assert result.mu == pytest.approx(signal.wavenumber / pump.wavenumber, rel=1e-15)
    assert kinematics.omega_to_wavelength(result.omega_i) == pytest.approx(3428.44e-9, rel=1e-5)


def test_mismatched_confocal_rejected(stry_crystal):
    pump = dfg.gaussian_beam_for_confocal(0.1, 812e-9, 2.175, 0.024)
    signal = dfg.gaussian_beam_for_confocal(0.1, 1064e-9, 2.156, 0.030)
    with pytest.raises(MismatchedConfocal):
        dfg.dfg_power_focused(pump, signal, stry_crystal, 0.0)


def test_focused_power_bilinear_in_powers(stry_crystal, stry_beams):
    pump, signal = stry_beams
    base = dfg.dfg_power_focused(pump, signal, stry_crystal, 0.0)
    doubled = dfg.dfg_power_focused(replace(pump, power=2 * pump.power), signal, stry_crystal, 0.0)
    tripled = dfg.dfg_power_focused(pump, replace(signal, power=3 * signal.power), stry_crystal, 0.0)
    assert doubled == pytest.approx(2 * base, rel=1e-12)
    assert tripled == pytest.approx(3 * base, rel=1e-12)


def test_absorption_and_calibration_scale_power(stry_crystal, stry_beams):
    pump, signal = stry_beams
    lossless = dfg.dfg_power_focused(pump, signal, replace(stry_crystal, alpha=0.0), 0.0)
    lossy = dfg.dfg_power_focused(pump, signal, stry_crystal, 0.0)
    assert lossy == pytest.approx(lossless * math.exp(-4.0 * 0.05), rel=1e-12)
    scaled = dfg.dfg_power_focused(pump, signal, stry_crystal, 0.0, calibration=2.5)
    assert scaled == pytest.approx(2.5 * lossy, rel=1e-12)


def test_planewave_matched_limit(stry_crystal):
    result = dfg.dfg_power_planewave(0.1, 0.2, stry_crystal, 1e14, 0.0)
    assert result.normalized == 1.0


def test_planewave_sinc_curve_pointwise(stry_crystal):
    L = stry_crystal.length
    for dk in np.linspace(-12 * math.pi / L, 12 * math.pi / L, 97):
        x = dk * L / 2
        expected = 1.0 if x == 0 else (math.sin(x) / x) ** 2
        normalized = dfg.dfg_power_planewave(0.1, 0.2, stry_crystal, 1e14, dk).normalized
        assert normalized == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_planewave_first_zero_at_two_pi(stry_crystal):
    L = stry_crystal.length
    at_zero = dfg.dfg_power_planewave(1.0, 1.0, stry_crystal, 1e14, 2 * math.pi / L).normalized
    assert at_zero == pytest.approx(0.0, abs=1e-30)
    before = dfg.dfg_power_planewave(1.0, 1.0, stry_crystal, 1e14, 1.99 * math.pi / L).normalized
    assert before > 0


def test_planewave_scales_with_idler_frequency_squared(stry_crystal):
    low = dfg.dfg_power_planewave(0.1, 0.2, stry_crystal, 1e14, 0.0).raw
    high = dfg.dfg_power_planewave(0.1, 0.2, stry_crystal, 3e14, 0.0).raw
    assert high / low == pytest.approx(9.0, rel=1e-12)


def test_phase_matching_curve_matches_planewave(stry_crystal):
    dk = np.array([0.0, 10.0, 100.0])
    curve = dfg.phase_matching_curve(stry_crystal, dk)
    expected = [dfg.dfg_power_planewave(1, 1, stry_crystal, 1e14, v).normalized for v in dk]
    np.testing.assert_allclose(curve, expected, rtol=0, atol=0)


def test_loose_focusing_length_squared_scaling():
    beam_p = GaussianBeam(1.0, 2e-3, 812e-9, 2.175)
    beam_s = GaussianBeam(1.0, 2e-3 * math.sqrt((1064 / 2.156) / (812 / 2.175)), 1064e-9, 2.156)
    crystal = CrystalConfig(length=0.002, n_p=2.175, n_s=2.156, n_i=2.085, d_eff=1e-11)
    short = dfg.dfg_power_focused(beam_p, beam_s, crystal, 0.0)
    long = dfg.dfg_power_focused(beam_p, beam_s, replace(crystal, length=0.004), 0.0)
    assert long / short == pytest.approx(4.0, rel=0.02)


def test_conversion_efficiency_unit_case():
    assert dfg.conversion_efficiency(1.0, 1.0, 1.0, 0.01) == pytest.approx(100.0, rel=1e-12)
    assert dfg.qpm_effective_d(math.pi / 2) == pytest.approx(1.0, rel=1e-15)
    assert dfg.qpm_effective_d(27e-12, 0.85) == pytest.approx(14.61e-12, rel=1e-3)
