# src/physics/focusing.py
"""
差频产生的高斯光束聚焦函数 h(μ, ξ, Δk) 及其最佳聚焦搜索。

约化坐标 τ = 2z/b。规范形式中束腰位于晶体入射面，晶体覆盖 τ ∈ [0, 2ξ]；
中心形式中束腰位于晶体中心，晶体覆盖 τ ∈ [−ξ, ξ]。两者的被积函数为
exp(−iσ(τ−τ′)) / [1 + ττ′ − i·a(τ−τ′)]，σ = Δk·b/2，积分除以 4ξ。
"""
from functools import lru_cache
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy.integrate import cubature
from scipy.optimize import minimize_scalar

from src.common import config
from src.common.data_models import (FocusingInput, FocusingOptimum, FocusingResult,
                                    FocusingVariant, XiScanPoint)
from src.common.errors import InvalidInput, QuadratureFailure
from src.common.logger import logger
from src.common.parallel import parallel_map
from src.common.utils import is_unimodal


def kernel_coefficient(mu: float, variant: FocusingVariant = FocusingVariant.CANONICAL) -> float:
    """被积函数分母中 (τ−τ′) 的系数 a。"""
    if not 0 < mu < 1:
        raise InvalidInput(f"μ 必须位于 (0, 1): {mu}")
    forward = (1 + mu) / (1 - mu)
    backward = (1 - mu) / (1 + mu)
    if variant == FocusingVariant.CENTERED:
        return 0.5 * (forward + backward)
    return 0.5 * (forward - backward)


def _domain(xi: float, variant: FocusingVariant) -> Tuple[float, float]:
    if variant == FocusingVariant.CENTERED:
        return -xi, xi
    return 0.0, 2.0 * xi


def _integrand(a_mu: float, sigma: float, part: str) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(points: np.ndarray) -> np.ndarray:
        tau = points[:, 0]
        tau_p = points[:, 1]
        diff = tau - tau_p
        values = np.exp(-1j * sigma * diff) / (1.0 + tau * tau_p - 1j * a_mu * diff)
        component = values.real if part == "real" else values.imag
        return component[:, np.newaxis]
    return evaluate


def _integrate(func, lo: float, hi: float, rtol: float, atol: float, label: str):
    result = cubature(func, [lo, lo], [hi, hi], rule="gk21", rtol=rtol, atol=atol,
                      max_subdivisions=config.QUAD_MAX_SUBDIVISIONS)
    estimate = float(result.estimate[0])
    error = float(result.error[0])
    if result.status != "converged":
        raise QuadratureFailure(
            f"{label} 积分未收敛: 估计值 {estimate:.6e}, 误差 {error:.3e}, 要求相对容差 {rtol:.1e}",
            estimate, error)
    return estimate, error, int(result.subdivisions)


def integrate_focusing(params: FocusingInput,
                       variant: FocusingVariant = FocusingVariant.CANONICAL,
                       rtol: float = config.QUAD_REL_TOL,
                       atol: float = config.QUAD_ABS_TOL,
                       check_imaginary: bool = True) -> FocusingResult:
    """
    计算聚焦函数并返回误差估计与虚部残差。

    被积函数在 τ↔τ′ 交换下共轭对称，因此精确结果为实数；
    虚部单独积分，仅作为数值残差报告。

    Raises:
        QuadratureFailure: 自适应积分未达到相对容差。
    """
    a_mu = kernel_coefficient(params.mu, variant)
    lo, hi = _domain(params.xi, variant)
    scale = 1.0 / (4.0 * params.xi)

    raw, raw_error, subdivisions = _integrate(
        _integrand(a_mu, params.dk_half_b, "real"), lo, hi, rtol, atol, "实部")

    imaginary = 0.0
    if check_imaginary:
        imag_atol = max(atol, 0.25 * rtol * abs(raw))
        raw_imag, _, extra = _integrate(
            _integrand(a_mu, params.dk_half_b, "imag"), lo, hi, rtol, imag_atol, "虚部")
        imaginary = raw_imag * scale
        subdivisions += extra

    return FocusingResult(h=raw * scale, error=raw_error * scale,
                          imaginary=imaginary, subdivisions=subdivisions)


def focusing_function(params: FocusingInput,
                      variant: FocusingVariant = FocusingVariant.CANONICAL,
                      rtol: float = config.QUAD_REL_TOL) -> float:
    """返回聚焦函数 h(μ, ξ, Δk·b/2) 的实数值。"""
    return integrate_focusing(params, variant, rtol=rtol).h


def best_dk_half_b(mu: float, xi: float,
                   variant: FocusingVariant = FocusingVariant.CANONICAL,
                   rtol: float = config.SCAN_REL_TOL) -> Tuple[float, float]:
    """
    固定 ξ 时对 σ = Δk·b/2 求 h 的最大值。先粗网格定位主瓣，再在相邻格点之间做有界 Brent 搜索。

    Returns:
        (σ*, h*)
    """
    def h_at(sigma: float) -> float:
        return integrate_focusing(FocusingInput(mu, xi, sigma), variant,
                                  rtol=rtol, check_imaginary=False).h

    lo, hi = config.DK_SCAN_RANGE
    step = config.DK_SCAN_STEP
    sigmas = np.arange(lo, hi + 0.5 * step, step)
    values = np.array([h_at(s) for s in sigmas])
    k = int(np.argmax(values))
    best_sigma, best_h = float(sigmas[k]), float(values[k])

    refined = minimize_scalar(lambda s: -h_at(s), bounds=(best_sigma - step, best_sigma + step),
                              method="bounded", options={"xatol": 1e-5})
    if refined.success and -refined.fun > best_h:
        best_sigma, best_h = float(refined.x), float(-refined.fun)
    return best_sigma, best_h


def _scan_point(mu: float, xi: float, optimize_dk: bool, dk_half_b: float,
                variant: FocusingVariant, rtol: float) -> XiScanPoint:
    if optimize_dk:
        sigma, h = best_dk_half_b(mu, xi, variant, rtol)
        return XiScanPoint(xi=float(xi), h=h, dk_half_b=sigma)
    h = integrate_focusing(FocusingInput(mu, xi, dk_half_b), variant,
                           rtol=rtol, check_imaginary=False).h
    return XiScanPoint(xi=float(xi), h=h, dk_half_b=dk_half_b)


def scan_focusing(mu: float, xi_values: Sequence[float], optimize_dk: bool = True,
                  dk_half_b: float = 0.0,
                  variant: FocusingVariant = FocusingVariant.CANONICAL,
                  rtol: float = config.SCAN_REL_TOL) -> List[XiScanPoint]:
    """在给定 ξ 序列上计算 h (可选对 Δk 取最优)，结果与线程数无关。"""
    return parallel_map(lambda xi: _scan_point(mu, xi, optimize_dk, dk_half_b, variant, rtol),
                        list(xi_values), desc=f"ξ 扫描 (μ={mu:.3f})")


def optimize_focusing(mu: float, optimize_dk: bool = True, dk_half_b: float = 0.0,
                      xi_min: float = config.XI_SCAN_MIN,
                      xi_max: float = config.XI_SCAN_MAX,
                      points: int = config.XI_COARSE_POINTS,
                      variant: FocusingVariant = FocusingVariant.CANONICAL,
                      rtol: float = config.SCAN_REL_TOL) -> FocusingOptimum:
    """
    在对数网格上粗扫描 ξ，再以黄金分割搜索细化到相对精度 XI_REL_TOL。
    """
    if not 0 < xi_min < xi_max:
        raise InvalidInput(f"ξ 扫描区间无效: [{xi_min}, {xi_max}]")
    if points < 3:
        raise InvalidInput(f"粗扫描点数至少为 3: {points}")

    xi_grid = np.geomspace(xi_min, xi_max, points)
    scan = scan_focusing(mu, xi_grid, optimize_dk, dk_half_b, variant, rtol)
    heights = [p.h for p in scan]
    if not is_unimodal(heights):
        logger.warning(f"μ={mu:.4f} 时 h(ξ) 在扫描区间内不是单峰函数")

    k = int(np.argmax(heights))
    best = scan[k]
    if k == 0 or k == len(scan) - 1:
        logger.warning(f"h(ξ) 的最大值位于扫描边界 ξ={best.xi:.4g}，未做细化")
        return FocusingOptimum(best.xi, best.h, best.dk_half_b, scan)

    @lru_cache(maxsize=None)
    def evaluate(xi: float) -> XiScanPoint:
        return _scan_point(mu, xi, optimize_dk, dk_half_b, variant, rtol)

    try:
        refined = minimize_scalar(lambda xi: -evaluate(float(xi)).h,
                                  bracket=(xi_grid[k - 1], xi_grid[k], xi_grid[k + 1]),
                                  method="golden", options={"xtol": 0.5 * config.XI_REL_TOL})
        candidate = evaluate(float(refined.x))
        if candidate.h >= best.h:
            best = candidate
    except ValueError as e:
        logger.warning(f"黄金分割细化失败，沿用粗扫描结果: {e}")

    logger.info(f"最佳聚焦: μ={mu:.4f}, ξ*={best.xi:.4f}, h*={best.h:.5f}, Δk·b/2={best.dk_half_b:.4f}")
    return FocusingOptimum(best.xi, best.h, best.dk_half_b, scan)


def optimum_focusing(mu: float, optimize_dk: bool = True, **kwargs) -> Tuple[float, float]:
    """返回 (ξ*, h*)。"""
    result = optimize_focusing(mu, optimize_dk, **kwargs)
    return result.xi, result.h


def focusing_map(mu: float, xi_values: Sequence[float], dk_values: Sequence[float],
                 variant: FocusingVariant = FocusingVariant.CANONICAL,
                 rtol: float = config.SCAN_REL_TOL) -> np.ndarray:
    """h 在 (Δk·b/2, ξ) 网格上的取值，行对应 Δk·b/2，列对应 ξ。"""
    def column(xi: float) -> List[float]:
        return [integrate_focusing(FocusingInput(mu, xi, s), variant,
                                   rtol=rtol, check_imaginary=False).h for s in dk_values]

    columns = parallel_map(column, list(xi_values), desc="聚焦函数二维图")
    return np.array(columns, dtype=float).T
