import math
import warnings

import numpy as np
import pytest

from src.analysis.fringes import fringe_analysis
from src.common.data_models import (DetectorSettings, Field1D, FreeSpace, Mask, QuantumMirror, Scene,
                                    SourceSpec, ThinLens)
from src.common.errors import AliasingRisk, GridMismatch, InvalidInput, NoConvergence
from src.common.config import STIMULATION_BETA
from src.optics import wave_engine
from src.optics.imaging_laws import sqm_image_distance
from src.physics.kinematics import qm_reflection_angle, wavelength_to_omega


def _second_moment_width(field):
    intensity = field.intensity
    x = field.x
    mean = np.sum(x * intensity) / np.sum(intensity)
    variance = np.sum((x - mean) ** 2 * intensity) / np.sum(intensity)
    # exp(−2x²/w²) 的二阶矩为 w²/4
    return 2.0 * math.sqrt(variance)


def test_propagation_conserves_power():
    field = wave_engine.gaussian_field(4096, 2e-6, 800e-9, 50e-6)
    out = wave_engine.fresnel_propagate(field, 0.05)
    assert out.power == pytest.approx(field.power, rel=1e-6)


def test_gaussian_beam_spreads_as_expected():
    w0, wavelength, z = 50e-6, 800e-9, 0.05
    field = wave_engine.gaussian_field(4096, 2e-6, wavelength, w0)
    out = wave_engine.fresnel_propagate(field, z)
    z_r = math.pi * w0 ** 2 / wavelength
    assert _second_moment_width(out) == pytest.approx(w0 * math.sqrt(1 + (z / z_r) ** 2), rel=0.01)


def test_propagation_composes():
    field = wave_engine.gaussian_field(2048, 2e-6, 800e-9, 40e-6)
    two_step = wave_engine.fresnel_propagate(wave_engine.fresnel_propagate(field, 0.01), 0.02)
    one_step = wave_engine.fresnel_propagate(field, 0.03)
    np.testing.assert_allclose(two_step.samples, one_step.samples, atol=1e-10)


def test_zero_and_negative_distance():
    field = wave_engine.gaussian_field(256, 2e-6, 800e-9, 40e-6)
    np.testing.assert_array_equal(wave_engine.fresnel_propagate(field, 0.0).samples, field.samples)
    with pytest.raises(InvalidInput):
        wave_engine.fresnel_propagate(field, -1.0)


def test_lens_focuses_gaussian():
    field = wave_engine.gaussian_field(4096, 2e-6, 800e-9, 1e-3)
    focused = wave_engine.fresnel_propagate(wave_engine.apply_element(field, ThinLens(0.1)), 0.1)
    peak = int(np.argmax(focused.intensity))
    assert abs(focused.x[peak]) <= 2 * focused.dx
    assert focused.intensity[peak] > 10 * np.max(field.intensity)


def test_sharpness_measures_concentration():
    assert wave_engine.sharpness(np.ones(8)) == pytest.approx(1 / 8)
    assert wave_engine.sharpness(np.array([0.0, 2.0, 0.0])) == 1.0
    assert wave_engine.sharpness(np.zeros(4)) == 0.0


def test_locate_sharpest_plane_finds_focus():
    field = wave_engine.gaussian_field(4096, 2e-6, 800e-9, 1e-3)
    after_lens = wave_engine.apply_element(field, ThinLens(0.1))
    distance, metric = wave_engine.locate_sharpest_plane(after_lens, [0.05, 0.1, 0.15])
    assert distance == 0.1
    assert metric.shape == (3,)
    assert metric[1] > max(metric[0], metric[2])
    with pytest.raises(InvalidInput):
        wave_engine.locate_sharpest_plane(after_lens, [])


def test_sharpest_plane_on_scan_boundary_rejected():
    field = wave_engine.gaussian_field(4096, 2e-6, 800e-9, 1e-3)
    after_lens = wave_engine.apply_element(field, ThinLens(0.1))
    with pytest.raises(NoConvergence):
        wave_engine.locate_sharpest_plane(after_lens, [0.1, 0.15, 0.2])


def test_mask_transmission_validated():
    field = wave_engine.plane_wave(64, 1e-6, 800e-9)
    with pytest.raises(InvalidInput):
        wave_engine.apply_element(field, Mask(lambda x: np.full(x.shape, 1.5), "gain"))
    slit = wave_engine.apply_element(field, wave_engine.slit_mask((0.0,), 10e-6))
    assert 0 < slit.power < field.power


def test_tabulated_mask_interpolates_and_validates():
    mask = wave_engine.tabulated_mask(np.array([-1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]))
    np.testing.assert_allclose(mask.transmission(np.array([-2.0, -0.5, 0.0, 0.5])), [0.0, 0.5, 1.0, 0.5])
    with pytest.raises(InvalidInput):
        wave_engine.tabulated_mask(np.array([0.0, 0.0]), np.array([1.0, 1.0]))
    with pytest.raises(InvalidInput):
        wave_engine.tabulated_mask(np.array([0.0, 1.0]), np.array([1.0, 2.0]))


def test_spherical_pump_phase():
    template = wave_engine.plane_wave(128, 1e-5, 800e-9)
    pump = wave_engine.pump_field(QuantumMirror(400e-9, 0.5), template)
    expected = np.exp(1j * (2 * math.pi / 400e-9) * template.x ** 2 / (2 * 0.5))
    np.testing.assert_allclose(pump.samples, expected, rtol=1e-12)
    flat = wave_engine.pump_field(QuantumMirror(400e-9), template)
    np.testing.assert_array_equal(flat.samples, np.ones(128))


def test_conversion_conjugates_and_changes_wavelength():
    signal = wave_engine.gaussian_field(256, 2e-6, 600e-9, 40e-6)
    pump = wave_engine.plane_wave(256, 2e-6, 400e-9)
    idler = wave_engine.qm_convert(signal, pump, 400e-9)
    assert idler.wavelength_vac == pytest.approx(1200e-9, rel=1e-12)
    np.testing.assert_allclose(idler.samples, np.conj(signal.samples))


def test_spherical_pump_idler_curvature_follows_imaging_law():
    lambda_s, lambda_p, a, radius = 800e-9, 532e-9, 0.08, 0.1
    template = wave_engine.plane_wave(2048, 1e-6, lambda_s)
    # 距镜 a 处点源在镜面上的近轴发散球面波
    signal = Field1D(np.exp(1j * math.pi * template.x ** 2 / (lambda_s * a)), template.dx, lambda_s,
                     template.origin)
    pump = wave_engine.pump_field(QuantumMirror(lambda_p, radius), template)
    idler = wave_engine.qm_convert(signal, pump, lambda_p, coupling=1.0)
    b = sqm_image_distance(lambda_s, idler.wavelength_vac, lambda_p, a, radius)
    expected = np.exp(1j * math.pi * template.x ** 2 / (idler.wavelength_vac * b))
    np.testing.assert_allclose(idler.samples, expected, atol=1e-9)


def test_degenerate_plane_mirror_undoes_propagation():
    waist = wave_engine.gaussian_field(2048, 2e-6, 800e-9, 40e-6)
    spread = wave_engine.fresnel_propagate(waist, 0.02)
    conjugate = wave_engine.qm_convert(spread, wave_engine.plane_wave(2048, 2e-6, 400e-9), 400e-9,
                                       coupling=1.0)
    refocused = wave_engine.fresnel_propagate(conjugate, 0.02)
    np.testing.assert_allclose(refocused.samples, waist.samples, atol=1e-10)


def test_tilted_signal_reflects_at_quantum_mirror_angle():
    theta_s = 0.1
    signal = wave_engine.tilted_plane_wave(1024, 2e-6, 600e-9, theta_s)
    idler = wave_engine.qm_convert(signal, wave_engine.plane_wave(1024, 2e-6, 400e-9), 400e-9)
    step = np.angle(idler.samples[1:] * np.conj(idler.samples[:-1]))
    k_i = 2 * math.pi / idler.wavelength_vac
    measured = math.asin(abs(float(np.mean(step))) / (k_i * idler.dx))
    expected = qm_reflection_angle(theta_s, wavelength_to_omega(600e-9), wavelength_to_omega(400e-9))
    assert measured == pytest.approx(expected, rel=1e-9)


def test_grid_mismatch():
    signal = wave_engine.plane_wave(64, 1e-6, 600e-9)
    pump = wave_engine.plane_wave(64, 2e-6, 400e-9)
    with pytest.raises(GridMismatch):
        wave_engine.qm_convert(signal, pump, 400e-9)


def test_aliasing_risk_warned():
    field = wave_engine.point_source_field(1024, 2e-6, 800e-9)
    with pytest.warns(AliasingRisk):
        wave_engine.fresnel_propagate(field, 1.0)


def test_detection_modes():
    intensity = np.array([1.0, 3.0])
    np.testing.assert_array_equal(wave_engine.apply_detection(intensity, "coincidence", 5.0), intensity)
    np.testing.assert_allclose(wave_engine.apply_detection(intensity, "singles", 0.5), [2.0, 4.0])
    with pytest.raises(InvalidInput):
        wave_engine.apply_detection(intensity, "singles", -0.1)
    with pytest.raises(InvalidInput):
        wave_engine.apply_detection(intensity, "both", 0.0)


def test_singles_background_lowers_visibility():
    x = np.arange(2000) * 1e-5
    fringes = 1.0 + np.cos(2 * math.pi * x / 1e-3)
    coincidence = fringe_analysis(wave_engine.apply_detection(fringes, "coincidence", 1.0), 1e-5)
    singles = fringe_analysis(wave_engine.apply_detection(fringes, "singles", 1.0), 1e-5)
    assert singles.visibility < coincidence.visibility
    assert singles.visibility == pytest.approx(0.5, abs=1e-3)


def test_run_field_chain_requires_source_and_single_mirror():
    with pytest.raises(InvalidInput):
        wave_engine.run_field_chain(Scene(elements=(FreeSpace(0.1), QuantumMirror(400e-9))))
    with pytest.raises(InvalidInput):
        wave_engine.run_field_chain(Scene(elements=(FreeSpace(0.1),), source=SourceSpec("plane", 800e-9)))


def test_simulate_scene_windows_detection():
    scene = Scene(elements=(FreeSpace(0.01), QuantumMirror(400e-9), FreeSpace(0.01)),
                  source=SourceSpec("gaussian", 800e-9, waist=100e-6),
                  detector=DetectorSettings(half_width=0.5e-3), grid_size=2048, dx=2e-6)
    result = wave_engine.simulate_scene(scene)
    assert np.all(np.abs(result.x) <= 0.5e-3)
    assert result.x.shape == result.intensity.shape
    assert result.idler_wavelength == pytest.approx(800e-9, rel=1e-12)


def _stimulated_fringes(mean_photon):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasingRisk)
        x, intensity = wave_engine.stimulated_fringe_pattern(2 ** 17, 2.5e-6, 800e-9, 0.2e-3, 20e-6, 0.5,
                                                             mean_photon)
    window = np.abs(x) <= 5e-3
    return fringe_analysis(intensity[window], 2.5e-6)


def test_double_slit_period():
    report = _stimulated_fringes(1e6 / STIMULATION_BETA)
    assert report.period == pytest.approx(800e-9 * 0.5 / 0.2e-3, rel=0.01)
    assert report.visibility > 0.95


def test_stimulated_visibility_follows_model():
    report = _stimulated_fringes(1.0 / STIMULATION_BETA)
    assert report.visibility == pytest.approx(0.5, abs=0.02)
