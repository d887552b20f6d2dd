import numpy as np
import pytest

from src.common import config
from src.common.data_models import FocusingInput, FocusingVariant
from src.common.errors import InvalidInput, QuadratureFailure
from src.common.utils import is_unimodal
from src.physics import focusing


def midpoint_oracle(mu, xi, sigma=0.0, n=4000, variant=FocusingVariant.CANONICAL):
    """二维中点求和，逐块累加以控制内存。"""
    a_mu = focusing.kernel_coefficient(mu, variant)
    lo, hi = (0.0, 2.0 * xi) if variant == FocusingVariant.CANONICAL else (-xi, xi)
    step = (hi - lo) / n
    tau = lo + (np.arange(n) + 0.5) * step
    total = 0.0
    for start in range(0, n, 250):
        rows = tau[start:start + 250, np.newaxis]
        diff = rows - tau[np.newaxis, :]
        values = np.exp(-1j * sigma * diff) / (1.0 + rows * tau[np.newaxis, :] - 1j * a_mu * diff)
        total += float(np.sum(values.real))
    return total * step * step / (4.0 * xi)


def test_kernel_coefficient_variants():
    assert focusing.kernel_coefficient(0.5) == pytest.approx(4.0 / 3.0, rel=1e-14)
    assert focusing.kernel_coefficient(0.5, FocusingVariant.CENTERED) == pytest.approx(5.0 / 3.0, rel=1e-14)
    with pytest.raises(InvalidInput):
        focusing.kernel_coefficient(1.0)


@pytest.mark.parametrize("mu", [0.2, 0.5, 0.8])
@pytest.mark.parametrize("variant", [FocusingVariant.CANONICAL, FocusingVariant.CENTERED])
def test_loose_focusing_limit(mu, variant):
    h = focusing.focusing_function(FocusingInput(mu, 0.01, 0.0), variant)
    assert 0.98 <= h / 0.01 <= 1.02


def test_result_is_real():
    result = focusing.integrate_focusing(FocusingInput(0.5, 1.5, 0.7))
    assert abs(result.imaginary) <= 1e-6 * abs(result.h)
    assert result.error >= 0
    assert result.subdivisions >= 1


@pytest.mark.slow
@pytest.mark.parametrize("mu", [0.2, 0.35, 0.5, 0.65, 0.8])
def test_matches_midpoint_oracle(mu):
    for xi in (0.1, 0.5, 1.0, 2.0, 3.0):
        h = focusing.focusing_function(FocusingInput(mu, xi, 0.0))
        assert h == pytest.approx(midpoint_oracle(mu, xi), rel=1e-4)


@pytest.mark.slow
def test_matches_oracle_with_mismatch_and_centered():
    params = FocusingInput(0.5, 1.2, 0.8)
    assert focusing.focusing_function(params) == pytest.approx(midpoint_oracle(0.5, 1.2, 0.8), rel=1e-4)
    centered = focusing.focusing_function(params, FocusingVariant.CENTERED)
    oracle = midpoint_oracle(0.5, 1.2, 0.8, variant=FocusingVariant.CENTERED)
    assert centered == pytest.approx(oracle, rel=1e-4)


@pytest.mark.parametrize("params", [FocusingInput(0.5, 1.5, 0.0), FocusingInput(0.3, 4.0, 1.2)])
def test_quadrature_converges_within_reported_error(params):
    coarse = focusing.integrate_focusing(params, rtol=1e-6)
    fine = focusing.integrate_focusing(params, rtol=5e-7)
    assert abs(coarse.h - fine.h) <= coarse.error + fine.error
    assert coarse.error <= 1e-6 * abs(coarse.h)


def test_quadrature_failure_reported(monkeypatch):
    monkeypatch.setattr(config, "QUAD_MAX_SUBDIVISIONS", 1)
    with pytest.raises(QuadratureFailure) as info:
        focusing.integrate_focusing(FocusingInput(0.5, 5.0, 30.0), rtol=1e-12)
    assert info.value.error >= 0


def test_focusing_input_domain():
    with pytest.raises(InvalidInput):
        FocusingInput(0.0, 1.0)
    with pytest.raises(InvalidInput):
        FocusingInput(0.5, 0.0)


def test_optimum_focusing_with_dk_optimised():
    optimum = focusing.optimize_focusing(0.5, optimize_dk=True, xi_min=0.2, xi_max=5.0, points=25)
    assert 0.8 <= optimum.xi <= 2.0
    assert is_unimodal([p.h for p in optimum.scan])
    assert optimum.h >= max(p.h for p in optimum.scan)


def test_optimum_focusing_tuple_form():
    xi_star, h_star = focusing.optimum_focusing(0.5, optimize_dk=False, xi_min=0.2, xi_max=5.0, points=20)
    assert 0.2 < xi_star < 5.0
    assert h_star > 0


def test_scan_independent_of_thread_count(monkeypatch):
    xi_values = [0.3, 0.9, 1.7, 2.5]
    serial = focusing.scan_focusing(0.4, xi_values, optimize_dk=False)
    monkeypatch.setattr(config, "MAX_WORKERS", 4)
    threaded = focusing.scan_focusing(0.4, xi_values, optimize_dk=False)
    assert serial == threaded


def test_focusing_map_orientation():
    values = focusing.focusing_map(0.5, [0.5, 1.0], [0.0, 0.5, 1.0])
    assert values.shape == (3, 2)
    expected = focusing.integrate_focusing(FocusingInput(0.5, 1.0, 0.5), rtol=config.SCAN_REL_TOL,
                                           check_imaginary=False).h
    assert values[1, 1] == expected
