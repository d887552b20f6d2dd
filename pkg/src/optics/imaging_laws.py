# src/optics/imaging_laws.py
"""
量子镜成像的解析公式：球面量子镜成像方程与薄透镜鬼成像方程。
距离沿展开光路 (Klyshko 图) 度量，正的像距表示实像位于镜后。
"""
import math
from typing import Tuple

from src.common.data_models import (FreeSpace, ImagingSetup, QuantumMirror, Scene,
                                    SourceSpec, ThinLens)
from src.common.errors import ImageAtInfinity, InvalidInput
from src.physics.kinematics import idler_wavelength

# 能量守恒 1/λ_p = 1/λ_s + 1/λ_i 的相对容差
_ENERGY_TOL = 1e-9


def _check_wavelengths(lambda_s: float, lambda_i: float, lambda_p: float):
    if min(lambda_s, lambda_i, lambda_p) <= 0:
        raise InvalidInput("波长必须为正")
    mismatch = abs(1.0 / lambda_p - 1.0 / lambda_s - 1.0 / lambda_i)
    if mismatch > _ENERGY_TOL / lambda_p:
        raise InvalidInput(f"波长不满足能量守恒: λ_p={lambda_p}, λ_s={lambda_s}, λ_i={lambda_i}")


def sqm_image_distance(lambda_s: float, lambda_i: float, lambda_p: float,
                       a: float, R: float = math.inf) -> float:
    """
    球面量子镜成像方程 1/(λ_s·a) + 1/(λ_i·b) = 1/(λ_p·R)，返回像距 b。
    R = math.inf 表示平面泵浦。

    Raises:
        ImageAtInfinity: 1/(λ_p·R) − 1/(λ_s·a) = 0。
    """
    _check_wavelengths(lambda_s, lambda_i, lambda_p)
    if a == 0:
        raise InvalidInput("物距不能为零")
    pump_term = 0.0 if math.isinf(R) else 1.0 / (lambda_p * R)
    rhs = pump_term - 1.0 / (lambda_s * a)
    if rhs == 0:
        raise ImageAtInfinity(f"物距 a={a} m 与泵浦曲率 R={R} m 使像位于无穷远")
    return 1.0 / (lambda_i * rhs)


def sqm_focal_length(lambda_s: float, lambda_i: float, lambda_p: float, R: float) -> float:
    """球面量子镜对远处物体的像距 (a → ∞ 时的 b)。"""
    if math.isinf(R):
        raise ImageAtInfinity("平面泵浦的量子镜没有有限焦距")
    _check_wavelengths(lambda_s, lambda_i, lambda_p)
    return lambda_p * R / lambda_i


def ghost_thin_lens(S1: float, d1: float, d2: float, f: float,
                    lambda_s: float, lambda_i: float) -> Tuple[float, float]:
    """
    薄透镜鬼成像方程 1/S1 + 1/(d1 + (λ_i/λ_s)·d2) = 1/f。

    Returns:
        (残差, 横向放大率 M = (d1 + (λ_i/λ_s)·d2)/S1)
    """
    if S1 == 0 or f == 0:
        raise InvalidInput("物距与焦距不能为零")
    if lambda_s <= 0 or lambda_i <= 0:
        raise InvalidInput("波长必须为正")
    effective = d1 + (lambda_i / lambda_s) * d2
    if effective == 0:
        raise ImageAtInfinity("等效像距为零")
    residual = 1.0 / S1 + 1.0 / effective - 1.0 / f
    return residual, effective / S1


def ghost_image_distance(S1: float, d1: float, f: float, lambda_s: float, lambda_i: float) -> float:
    """求解鬼成像方程中闲频臂距离 d2。"""
    if S1 == 0 or f == 0:
        raise InvalidInput("物距与焦距不能为零")
    inverse = 1.0 / f - 1.0 / S1
    if inverse == 0:
        raise ImageAtInfinity(f"物距 S1={S1} m 等于焦距，像位于无穷远")
    return (1.0 / inverse - d1) * (lambda_s / lambda_i)


def imaging_setup_for_lens(S1: float, d1: float, f: float,
                           lambda_p: float, lambda_s: float) -> ImagingSetup:
    lambda_i = idler_wavelength(lambda_p, lambda_s)
    d2 = ghost_image_distance(S1, d1, f, lambda_s, lambda_i)
    _, magnification = ghost_thin_lens(S1, d1, d2, f, lambda_s, lambda_i)
    return ImagingSetup(S1=S1, f=f, d1=d1, d2=d2, M=magnification)


def imaging_setup_for_sqm(a: float, lambda_p: float, lambda_s: float,
                          R: float = math.inf) -> ImagingSetup:
    lambda_i = idler_wavelength(lambda_p, lambda_s)
    b = sqm_image_distance(lambda_s, lambda_i, lambda_p, a, R)
    # 展开图中像的横向放大率 M = −(λ_i·b)/(λ_s·a)
    return ImagingSetup(a=a, b=b, R=R, M=-(lambda_i * b) / (lambda_s * a))


def lens_scene(S1: float, f: float, d1: float, lambda_p: float, lambda_s: float,
               R: float = math.inf, fan_half_angle: float = 0.01) -> Scene:
    """物 -(S1)- 透镜 f -(d1)- 量子镜，闲频臂距离由追迹搜索。"""
    return Scene(elements=(FreeSpace(S1), ThinLens(f), FreeSpace(d1), QuantumMirror(lambda_p, R)),
                 source=SourceSpec("point", lambda_s), fan_half_angle=fan_half_angle)


def sqm_scene(a: float, lambda_p: float, lambda_s: float, R: float = math.inf,
              fan_half_angle: float = 0.01) -> Scene:
    """物 -(a)- 量子镜。"""
    return Scene(elements=(FreeSpace(a), QuantumMirror(lambda_p, R)),
                 source=SourceSpec("point", lambda_s), fan_half_angle=fan_half_angle)
