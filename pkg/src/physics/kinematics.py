# src/physics/kinematics.py
"""
量子镜运动学：能量守恒、横向动量守恒与准相位匹配。
所有频率为角频率 (rad/s)，长度为米，波矢为 rad/m。
"""
import math
from typing import Tuple, Union

import numpy as np

from src.common.data_models import PhotonTriad, PhysicalConstants, ReflectionGeometry
from src.common.errors import InvalidInput, NonPositiveIdler, NoPropagatingIdler

ArrayLike = Union[float, np.ndarray]
Vector3 = Tuple[float, float, float]

PHYSICAL_CONSTANTS = PhysicalConstants()


def wavelength_to_omega(wavelength_vac: float) -> float:
    if wavelength_vac <= 0:
        raise InvalidInput(f"波长必须为正: {wavelength_vac}")
    return 2 * math.pi * PHYSICAL_CONSTANTS.c / wavelength_vac


def omega_to_wavelength(omega: float) -> float:
    if omega <= 0:
        raise InvalidInput(f"角频率必须为正: {omega}")
    return 2 * math.pi * PHYSICAL_CONSTANTS.c / omega


def difference_frequency(omega_p: float, omega_s: float) -> float:
    """
    由能量守恒计算闲频角频率 ω_i = ω_p − ω_s。

    Raises:
        InvalidInput: 任一频率非正。
        NonPositiveIdler: ω_s ≥ ω_p。
    """
    if omega_p <= 0 or omega_s <= 0:
        raise InvalidInput(f"频率必须为正: ω_p={omega_p}, ω_s={omega_s}")
    if omega_s >= omega_p:
        raise NonPositiveIdler(f"信号频率 {omega_s:.6e} 不低于泵浦频率 {omega_p:.6e}")
    return omega_p - omega_s


def idler_wavelength(lambda_p: float, lambda_s: float) -> float:
    """真空闲频波长 λ_i = 1 / (1/λ_p − 1/λ_s)。"""
    if lambda_p <= 0 or lambda_s <= 0:
        raise InvalidInput(f"波长必须为正: λ_p={lambda_p}, λ_s={lambda_s}")
    if lambda_s <= lambda_p:
        raise NonPositiveIdler(f"信号波长 {lambda_s:.6e} m 不长于泵浦波长 {lambda_p:.6e} m")
    return 1.0 / (1.0 / lambda_p - 1.0 / lambda_s)


def idler_wavevector(k_p: Vector3, k_s: Vector3) -> Vector3:
    """相位匹配条件下的闲频波矢 k_i = k_p − k_s (逐分量)。"""
    if len(k_p) != 3 or len(k_s) != 3:
        raise InvalidInput("波矢必须为三维")
    return tuple(float(p) - float(s) for p, s in zip(k_p, k_s))


def build_triad(lambda_p: float, lambda_s: float, n_p: float = 1.0, n_s: float = 1.0,
                theta_s: float = 0.0) -> PhotonTriad:
    """
    由波长构造三光子组。泵浦沿 z 轴，信号在 xz 平面内与泵浦成 theta_s 角，
    闲频波矢由相位匹配条件给出。
    """
    omega_p = wavelength_to_omega(lambda_p)
    omega_s = wavelength_to_omega(lambda_s)
    omega_i = difference_frequency(omega_p, omega_s)
    k_p = (0.0, 0.0, wavevector_magnitude(lambda_p, n_p))
    k_s_mag = wavevector_magnitude(lambda_s, n_s)
    k_s = (k_s_mag * math.sin(theta_s), 0.0, k_s_mag * math.cos(theta_s))
    return PhotonTriad(omega_p, omega_s, omega_i, k_p, k_s, idler_wavevector(k_p, k_s))


def qm_reflection_angle(theta_ps: ArrayLike, omega_s: float, omega_p: float) -> ArrayLike:
    """
    量子镜反射角：sin θ_pi = (ω_s/ω_i)·sin θ_ps。角度均相对泵浦方向度量。

    Args:
        theta_ps: 信号光与泵浦的夹角 (rad)，取值 [0, π/2]，可为数组。
        omega_s: 信号角频率。
        omega_p: 泵浦角频率。

    Raises:
        NoPropagatingIdler: (ω_s/ω_i)·sin θ_ps > 1。
    """
    omega_i = difference_frequency(omega_p, omega_s)
    theta = np.asarray(theta_ps, dtype=float)
    if np.any(theta < 0) or np.any(theta > math.pi / 2):
        raise InvalidInput("θ_ps 必须位于 [0, π/2]")
    sine = (omega_s / omega_i) * np.sin(theta)
    worst = float(np.max(sine)) if sine.size else 0.0
    if worst > 1.0:
        raise NoPropagatingIdler(f"sin θ_pi = {worst:.6f} > 1，闲频光无法传播", worst)
    result = np.arcsin(sine)
    return float(result) if np.ndim(theta_ps) == 0 else result


def reflection_geometry(theta_ps: float, omega_s: float, omega_p: float) -> ReflectionGeometry:
    return ReflectionGeometry(float(theta_ps), qm_reflection_angle(float(theta_ps), omega_s, omega_p))


def wavevector_magnitude(wavelength_vac: float, index: float) -> float:
    """介质中的波数 k = 2πn/λ。"""
    if wavelength_vac <= 0:
        raise InvalidInput(f"波长必须为正: {wavelength_vac}")
    if index < 1:
        raise InvalidInput(f"折射率必须不小于 1: {index}")
    return 2 * math.pi * index / wavelength_vac


def phase_mismatch(k_p: float, k_s: float, k_i: float) -> float:
    """共线相位失配 Δk = k_p − k_s − k_i。"""
    return k_p - k_s - k_i


def qpm_grating_vector(period: float, order: int = 1) -> float:
    """周期极化光栅矢量 K_G = 2πm/Λ。"""
    if period <= 0:
        raise InvalidInput(f"极化周期必须为正: {period}")
    if order < 1:
        raise InvalidInput(f"准相位匹配阶数必须为正整数: {order}")
    return 2 * math.pi * order / period


def phase_mismatch_qpm(k_p: float, k_s: float, k_i: float, period: float, order: int = 1) -> float:
    """准相位匹配后的剩余失配 Δk = k_p − k_s − k_i − K_G。"""
    return phase_mismatch(k_p, k_s, k_i) - qpm_grating_vector(period, order)


def qpm_period_for_matching(k_p: float, k_s: float, k_i: float, order: int = 1) -> float:
    """使剩余失配为零的极化周期 Λ = 2πm/(k_p − k_s − k_i)。"""
    dk = phase_mismatch(k_p, k_s, k_i)
    if dk <= 0:
        raise InvalidInput(f"体失配 {dk:.6e} rad/m 非正，无法用正向光栅补偿")
    return 2 * math.pi * order / dk
