# src/physics/dfg.py
"""
差频产生 (DFG) 功率模型：平面波近场公式与 Boyd–Kleinman 型高斯光束聚焦公式。
"""
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import constants

from src.common import config
from src.common.data_models import (CrystalConfig, FocusingInput, FocusingVariant,
                                    GaussianBeam)
from src.common.errors import InvalidInput, MismatchedConfocal
from src.common.logger import logger
from src.physics.focusing import focusing_function
from src.physics.kinematics import difference_frequency, wavelength_to_omega

# 功率公式的常数前因子 C = 4/(π ε₀ c³)
FOCUSED_PREFACTOR = 4.0 / (math.pi * constants.epsilon_0 * constants.c ** 3)


class PlaneWavePower(NamedTuple):
    raw: float          # d²L²ω_i²/(n_p n_s n_i) · P_p P_s · sinc²(ΔkL/2)，比例意义
    normalized: float   # 相对 Δk = 0 的归一化值


class FocusedPowerBreakdown(NamedTuple):
    power: float
    omega_i: float
    mu: float
    confocal: float
    xi: float
    dk_half_b: float
    h: float


def confocal_parameter(k: float, waist: float) -> float:
    """b = k·w₀²。"""
    if k <= 0 or waist <= 0:
        raise InvalidInput(f"波数与束腰必须为正: k={k}, w0={waist}")
    return k * waist ** 2


def focusing_parameter(length: float, confocal: float) -> float:
    """ξ = L/b。"""
    if length <= 0 or confocal <= 0:
        raise InvalidInput(f"晶体长度与共焦参数必须为正: L={length}, b={confocal}")
    return length / confocal


def gaussian_beam_for_confocal(power: float, wavelength_vac: float, index: float,
                               confocal: float, beam_quality: float = 1.0) -> GaussianBeam:
    """按给定共焦参数构造介质内高斯光束 (w₀ = √(b/k))。"""
    k = 2 * math.pi * index / wavelength_vac
    return GaussianBeam(power=power, waist=math.sqrt(confocal / k),
                        wavelength_vac=wavelength_vac, index=index, beam_quality=beam_quality)


def qpm_effective_d(d_raw: float, miller_factor: float = 1.0) -> float:
    """一阶准相位匹配有效非线性系数 d_eff = (2/π)·d_raw·δ_Miller。"""
    if d_raw <= 0 or not 0 < miller_factor <= 1:
        raise InvalidInput(f"非线性系数必须为正且 Miller 因子位于 (0, 1]: {d_raw}, {miller_factor}")
    return (2.0 / math.pi) * d_raw * miller_factor


def conversion_efficiency(p_idler: float, p_pump: float, p_signal: float, length: float) -> float:
    """
    转换效率，单位 %/(W·cm)：100·P_i / (P_p·P_s·L[cm])。

    Args:
        length: 晶体长度，单位米。
    """
    if p_pump <= 0 or p_signal <= 0 or length <= 0:
        raise InvalidInput("泵浦/信号功率与晶体长度必须为正")
    return 100.0 * p_idler / (p_pump * p_signal * length * 100.0)


def _sinc_squared(dk: float, length: float) -> float:
    # np.sinc(x) = sin(πx)/(πx)
    return float(np.sinc(dk * length / (2.0 * math.pi)) ** 2)


def dfg_power_planewave(p_pump: float, p_signal: float, crystal: CrystalConfig,
                        omega_i: float, dk: float) -> PlaneWavePower:
    """
    平面波 DFG 功率：P_i ∝ d²L²ω_i²/(n_p n_s n_i)·P_p·P_s·sinc²(ΔkL/2)。
    raw 只具有比例意义；normalized 为相对完全相位匹配的比值。
    """
    if omega_i <= 0:
        raise InvalidInput(f"闲频角频率必须为正: {omega_i}")
    if p_pump < 0 or p_signal < 0:
        raise InvalidInput("功率不能为负")
    n_product = crystal.n_p * crystal.n_s * crystal.n_i
    matched = crystal.d_eff ** 2 * crystal.length ** 2 * omega_i ** 2 / n_product * (p_pump * p_signal)
    shape = _sinc_squared(dk, crystal.length)
    return PlaneWavePower(raw=matched * shape, normalized=shape)


def phase_matching_curve(crystal: CrystalConfig, dk_values: Sequence[float]) -> np.ndarray:
    """归一化相位匹配曲线 sinc²(ΔkL/2)。"""
    return np.array([_sinc_squared(dk, crystal.length) for dk in dk_values])


def dfg_power_breakdown(pump: GaussianBeam, signal: GaussianBeam, crystal: CrystalConfig,
                        dk: float, variant: FocusingVariant = FocusingVariant.CANONICAL,
                        calibration: Optional[float] = None) -> FocusedPowerBreakdown:
    """
    高斯光束聚焦 DFG 功率:
    P_i = cal·C·ω_i²·d²/(n_i n_s n_p)·L·b/(M_s²w_s² + M_p²w_p²)·h(μ, ξ, Δk)·P_p·P_s·e^(−αL)

    Raises:
        MismatchedConfocal: 两束光共焦参数相对差超过 5%。
    """
    b_p = pump.confocal
    b_s = signal.confocal
    if abs(b_p - b_s) > config.CONFOCAL_MATCH_TOL * max(b_p, b_s):
        raise MismatchedConfocal(f"共焦参数不一致: b_p={b_p:.4e} m, b_s={b_s:.4e} m")
    if signal.wavelength_vac <= pump.wavelength_vac:
        raise InvalidInput("信号波长必须长于泵浦波长")

    cal = config.DFG_CALIBRATION if calibration is None else calibration
    omega_i = difference_frequency(wavelength_to_omega(pump.wavelength_vac),
                                   wavelength_to_omega(signal.wavelength_vac))
    confocal = 0.5 * (b_p + b_s)
    mu = signal.wavenumber / pump.wavenumber
    xi = focusing_parameter(crystal.length, confocal)
    dk_half_b = dk * confocal / 2.0
    h = focusing_function(FocusingInput(mu, xi, dk_half_b), variant)

    n_product = crystal.n_p * crystal.n_s * crystal.n_i
    spot = signal.beam_quality ** 2 * signal.waist ** 2 + pump.beam_quality ** 2 * pump.waist ** 2
    coefficient = (cal * FOCUSED_PREFACTOR * omega_i ** 2 * crystal.d_eff ** 2 / n_product
                   * crystal.length * confocal / spot * h * math.exp(-crystal.alpha * crystal.length))
    power = coefficient * (pump.power * signal.power)
    logger.debug(f"DFG: μ={mu:.4f}, ξ={xi:.4f}, Δk·b/2={dk_half_b:.4f}, h={h:.5f}, P_i={power:.4e} W")
    return FocusedPowerBreakdown(power, omega_i, mu, confocal, xi, dk_half_b, h)


def dfg_power_focused(pump: GaussianBeam, signal: GaussianBeam, crystal: CrystalConfig,
                      dk: float, variant: FocusingVariant = FocusingVariant.CANONICAL,
                      calibration: Optional[float] = None) -> float:
    """返回聚焦 DFG 闲频功率 (W)。"""
    return dfg_power_breakdown(pump, signal, crystal, dk, variant, calibration).power
