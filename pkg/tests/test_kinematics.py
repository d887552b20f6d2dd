import math

import numpy as np
import pytest

from src.common.data_models import PhotonTriad, ReflectionGeometry
from src.common.errors import InvalidInput, NonPositiveIdler, NoPropagatingIdler
from src.physics import kinematics


def test_difference_frequency_exact_subtraction():
    assert kinematics.difference_frequency(2.0, 1.0) == 1.0


def test_difference_frequency_degenerate(degenerate_omegas):
    omega_p, omega_s = degenerate_omegas
    assert kinematics.difference_frequency(omega_p, omega_s) == omega_p / 2


def test_difference_frequency_errors():
    with pytest.raises(NonPositiveIdler):
        kinematics.difference_frequency(1.0, 1.0)
    with pytest.raises(NonPositiveIdler):
        kinematics.difference_frequency(1.0, 2.0)
    with pytest.raises(InvalidInput):
        kinematics.difference_frequency(0.0, 1.0)
    with pytest.raises(InvalidInput):
        kinematics.difference_frequency(2.0, -1.0)


def test_stry_idler_in_three_micron_region():
    omega_p = kinematics.wavelength_to_omega(812e-9)
    omega_s = kinematics.wavelength_to_omega(1064e-9)
    omega_i = kinematics.difference_frequency(omega_p, omega_s)
    lambda_i = kinematics.omega_to_wavelength(omega_i)
    assert lambda_i == pytest.approx(3428.5e-9, rel=1e-4)
    assert kinematics.idler_wavelength(812e-9, 1064e-9) == pytest.approx(lambda_i, rel=1e-12)


def test_idler_wavevector_examples():
    assert kinematics.idler_wavevector((0, 0, 10), (1, 0, 4)) == (-1.0, 0.0, 6.0)
    assert kinematics.idler_wavevector((1, 2, 3), (1, 2, 3)) == (0.0, 0.0, 0.0)
    assert kinematics.idler_wavevector((0, 0, 8.0), (0, 0, 4.0)) == (0.0, 0.0, 4.0)
    with pytest.raises(InvalidInput):
        kinematics.idler_wavevector((0, 1), (0, 0, 1))


def test_build_triad_conserves_energy_and_momentum():
    triad = kinematics.build_triad(812e-9, 1064e-9, n_p=2.175, n_s=2.156, theta_s=0.01)
    assert abs(triad.omega_p - triad.omega_s - triad.omega_i) <= 4 * np.spacing(triad.omega_p)
    for p, s, i in zip(triad.k_p, triad.k_s, triad.k_i):
        assert p - s - i == 0


def test_photon_triad_rejects_broken_conservation():
    with pytest.raises(InvalidInput):
        PhotonTriad(3.0, 1.0, 1.5)
    with pytest.raises(InvalidInput):
        PhotonTriad(2.0, 1.0, 1.0, k_p=(0, 0, 2), k_s=(0, 0, 1), k_i=(0, 0, 2))
    with pytest.raises(InvalidInput):
        PhotonTriad(2.0, 1.0, 1.0, k_p=(0, 0, 2))


def test_phase_mismatch_arithmetic():
    assert kinematics.phase_mismatch(10, 4, 5) == 1
    assert kinematics.phase_mismatch(10, 4, 6) == 0


def test_qpm_grating_folds_mismatch_to_zero():
    k_p = kinematics.wavevector_magnitude(812e-9, 2.175)
    k_s = kinematics.wavevector_magnitude(1064e-9, 2.156)
    k_i = kinematics.wavevector_magnitude(kinematics.idler_wavelength(812e-9, 1064e-9), 2.085)
    period = kinematics.qpm_period_for_matching(k_p, k_s, k_i)
    residual = kinematics.phase_mismatch_qpm(k_p, k_s, k_i, period)
    assert abs(residual) <= 1e-9 * kinematics.phase_mismatch(k_p, k_s, k_i)
    with pytest.raises(InvalidInput):
        kinematics.qpm_grating_vector(0.0)


def test_qm_reflection_degenerate_equal_angles(degenerate_omegas):
    omega_p, omega_s = degenerate_omegas
    theta = math.radians(17.0)
    assert kinematics.qm_reflection_angle(theta, omega_s, omega_p) == pytest.approx(theta, abs=1e-12)
    assert kinematics.qm_reflection_angle(0.0, omega_s, omega_p) == 0.0


def test_qm_reflection_degenerate_identity_over_grid(degenerate_omegas):
    omega_p, omega_s = degenerate_omegas
    angles = np.linspace(0.0, math.pi / 2, 1000)
    reflected = kinematics.qm_reflection_angle(angles, omega_s, omega_p)
    assert np.max(np.abs(reflected - angles)) <= 1e-12


def test_qm_reflection_frequency_ratio_two():
    # ω_s/ω_i = 2
    theta = kinematics.qm_reflection_angle(math.radians(20.0), 2.0, 3.0)
    assert math.degrees(theta) == pytest.approx(43.16, abs=0.01)
    assert 2.0 * math.sin(math.radians(20.0)) == pytest.approx(1.0 * math.sin(theta), rel=1e-12)


def test_qm_reflection_round_trip_and_monotonic():
    omega_p, omega_s = 5.0, 2.0
    omega_i = omega_p - omega_s
    angles = np.linspace(0.0, 1.2, 200)
    forward = kinematics.qm_reflection_angle(angles, omega_s, omega_p)
    back = kinematics.qm_reflection_angle(forward, omega_i, omega_p)
    np.testing.assert_allclose(back, angles, atol=1e-12)
    assert np.all(np.diff(forward) > 0)


def test_qm_reflection_rejects_evanescent_idler():
    with pytest.raises(NoPropagatingIdler) as info:
        kinematics.qm_reflection_angle(math.radians(60.0), 2.0, 3.0)
    assert info.value.sine_value > 1.0


def test_reflection_geometry():
    geometry = kinematics.reflection_geometry(0.3, 1.0, 2.0)
    assert isinstance(geometry, ReflectionGeometry)
    assert geometry.theta_pi == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(InvalidInput):
        ReflectionGeometry(-0.1, 0.0)


def test_wavevector_magnitude():
    assert kinematics.wavevector_magnitude(1.064e-6, 1.0) == pytest.approx(5.9052e6, rel=1e-4)
    assert kinematics.wavevector_magnitude(1.064e-6, 2.2) == pytest.approx(1.2992e7, rel=1e-4)
    assert kinematics.wavevector_magnitude(2 * math.pi, 1.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(InvalidInput):
        kinematics.wavevector_magnitude(0.0, 1.0)
    with pytest.raises(InvalidInput):
        kinematics.wavevector_magnitude(1e-6, 0.5)
