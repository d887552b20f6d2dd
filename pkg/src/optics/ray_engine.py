# src/optics/ray_engine.py
"""
近轴光线追迹引擎。光线以数组形式成束传播，量子镜按频率加权的
横向动量守恒更新斜率，并把光线波长改写为闲频波长。
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import constants
from scipy.optimize import minimize_scalar

from src.common import config
from src.common.data_models import (Element, FocusResult, Frame, FreeSpace, Mask,
                                    QmInteractions, QuantumMirror, Ray, Scene, ThinLens)
from src.common.errors import InvalidInput, NoConvergence, NonPositiveIdler, NoPropagatingIdler
from src.common.logger import logger
from src.common.utils import is_unimodal

TWO_PI_C = 2 * math.pi * constants.c


@dataclass
class RayBundle:
    """一束光线的数组表示，各数组等长。"""
    x: np.ndarray
    slope: np.ndarray
    wavelength: np.ndarray
    weight: np.ndarray
    violation: np.ndarray

    @classmethod
    def from_rays(cls, rays: Sequence[Ray]) -> "RayBundle":
        return cls(x=np.array([r.x for r in rays], dtype=float),
                   slope=np.array([r.slope for r in rays], dtype=float),
                   wavelength=np.array([r.wavelength_vac for r in rays], dtype=float),
                   weight=np.array([r.weight for r in rays], dtype=float),
                   violation=np.array([r.paraxial_violation for r in rays], dtype=bool))

    def to_rays(self) -> List[Ray]:
        return [Ray(float(x), float(s), float(w), float(g), bool(v))
                for x, s, w, g, v in zip(self.x, self.slope, self.wavelength, self.weight, self.violation)]

    def copy(self) -> "RayBundle":
        return RayBundle(self.x.copy(), self.slope.copy(), self.wavelength.copy(),
                         self.weight.copy(), self.violation.copy())

    @property
    def active(self) -> np.ndarray:
        return self.weight > 0


def _quantum_mirror(bundle: RayBundle, mirror: QuantumMirror, frame: Frame, exact: bool,
                    interactions: Optional[List[QmInteractions]]) -> RayBundle:
    omega_p = TWO_PI_C / mirror.pump_wavelength
    omega_s = TWO_PI_C / bundle.wavelength
    omega_i = omega_p - omega_s
    if np.any(omega_i <= 0):
        raise NonPositiveIdler(f"信号波长不长于泵浦波长 {mirror.pump_wavelength:.4e} m")

    # 泵浦局部传播方向 tan θ_p = x/R，平面泵浦为 0
    pump_tan = np.zeros_like(bundle.x) if math.isinf(mirror.pump_radius) else bundle.x / mirror.pump_radius

    if exact:
        sin_s = bundle.slope / np.sqrt(1.0 + bundle.slope ** 2)
        sin_p = pump_tan / np.sqrt(1.0 + pump_tan ** 2)
        sin_i = (omega_s * sin_s - omega_p * sin_p) / omega_i
        worst = float(np.max(np.abs(sin_i))) if sin_i.size else 0.0
        if worst > 1.0:
            raise NoPropagatingIdler(f"|sin θ_i| = {worst:.6f} > 1，闲频光无法传播", worst)
        slope_i = sin_i / np.sqrt(1.0 - sin_i ** 2)
        theta_s, theta_i, theta_p = np.arcsin(sin_s), np.arcsin(sin_i), np.arcsin(sin_p)
    else:
        slope_i = (omega_s * bundle.slope - omega_p * pump_tan) / omega_i
        theta_s, theta_i, theta_p = bundle.slope, slope_i, pump_tan

    if frame == Frame.FOLDED:
        slope_i = -slope_i
        theta_i = -theta_i

    if interactions is not None:
        interactions.append(QmInteractions(theta_s=np.asarray(theta_s), theta_i=np.asarray(theta_i),
                                           theta_p=np.asarray(theta_p), omega_s=omega_s, omega_i=omega_i))

    return RayBundle(bundle.x.copy(), slope_i, TWO_PI_C / omega_i, bundle.weight.copy(),
                     bundle.violation.copy())


def apply_element(bundle: RayBundle, element: Element, frame: Frame = Frame.UNFOLDED,
                  exact: bool = False,
                  interactions: Optional[List[QmInteractions]] = None) -> RayBundle:
    """让整束光线通过一个元件。"""
    if isinstance(element, FreeSpace):
        out = bundle.copy()
        out.x = bundle.x + element.distance * bundle.slope
    elif isinstance(element, ThinLens):
        out = bundle.copy()
        out.slope = bundle.slope - bundle.x / element.focal_length
    elif isinstance(element, Mask):
        transmission = np.asarray(element.transmission(bundle.x), dtype=float)
        if np.any(transmission < 0) or np.any(transmission > 1):
            raise InvalidInput(f"掩模 {element.label} 的透过率超出 [0, 1]")
        out = bundle.copy()
        out.weight = bundle.weight * transmission
    elif isinstance(element, QuantumMirror):
        out = _quantum_mirror(bundle, element, frame, exact, interactions)
    else:
        raise InvalidInput(f"未知光学元件类型: {type(element).__name__}")

    if not exact:
        out.violation = out.violation | (np.abs(out.slope) > config.PARAXIAL_SLOPE_LIMIT)
    return out


def propagate(ray: Ray, element: Element, frame: Frame = Frame.UNFOLDED, exact: bool = False) -> Ray:
    """
    单条光线通过一个元件。

    Raises:
        NoPropagatingIdler: 精确模式下量子镜的正弦值超过 1。
    """
    return apply_element(RayBundle.from_rays([ray]), element, frame, exact).to_rays()[0]


def trace(bundle: RayBundle, elements: Sequence[Element], frame: Frame = Frame.UNFOLDED,
          exact: bool = False,
          interactions: Optional[List[QmInteractions]] = None) -> RayBundle:
    for element in elements:
        bundle = apply_element(bundle, element, frame, exact, interactions)
    return bundle


def ray_fan(object_x: float, wavelength: float, half_angle: float, n_rays: int,
            rng: Optional[np.random.Generator] = None) -> RayBundle:
    """
    从物点出发的光线扇。rng 为空时斜率均匀排布，否则按均匀分布随机抽样。
    """
    if n_rays < 1:
        raise InvalidInput(f"光线数必须为正: {n_rays}")
    if half_angle <= 0:
        raise InvalidInput(f"扇形半角必须为正: {half_angle}")
    if rng is None:
        slopes = np.linspace(-half_angle, half_angle, n_rays)
    else:
        slopes = rng.uniform(-half_angle, half_angle, n_rays)
    return RayBundle(x=np.full(n_rays, float(object_x)), slope=slopes,
                     wavelength=np.full(n_rays, float(wavelength)),
                     weight=np.ones(n_rays), violation=np.zeros(n_rays, dtype=bool))


def _scene_wavelength(scene: Scene) -> float:
    if scene.source is None:
        raise InvalidInput("光路缺少信号光源定义")
    return scene.source.wavelength


def trace_scene(scene: Scene, object_x: float, n_rays: int,
                rng: Optional[np.random.Generator] = None,
                interactions: Optional[List[QmInteractions]] = None) -> RayBundle:
    """追迹从物点出发、穿过整个光路的光线扇，返回最后一个元件出射面上的光线。"""
    scene.validate()
    fan = ray_fan(object_x, _scene_wavelength(scene), scene.fan_half_angle, n_rays, rng)
    out = trace(fan, scene.elements, scene.frame, scene.exact, interactions)
    if np.any(out.violation):
        logger.warning(f"{int(np.sum(out.violation))} 条光线斜率超过近轴限值 {config.PARAXIAL_SLOPE_LIMIT}")
    return out


def spot_variance(bundle: RayBundle, distance: float) -> float:
    """距离出射面 distance 处的加权光斑方差 (可为负距离，表示虚像)。"""
    mask = bundle.active
    if not np.any(mask):
        raise InvalidInput("所有光线均被掩模遮挡")
    weights = bundle.weight[mask]
    positions = bundle.x[mask] + distance * bundle.slope[mask]
    mean = np.sum(weights * positions) / np.sum(weights)
    return float(np.sum(weights * (positions - mean) ** 2) / np.sum(weights))


def best_focus_curve(bundle: RayBundle, distances: Sequence[float]) -> np.ndarray:
    """RMS 光斑半径随距离的变化。"""
    return np.sqrt([spot_variance(bundle, d) for d in distances])


def locate_best_focus(bundle: RayBundle, search_range: Tuple[float, float]) -> FocusResult:
    """
    在 search_range 内寻找 RMS 光斑最小的位置：粗网格检验单峰性后做黄金分割细化。

    Raises:
        NoConvergence: 光斑曲线不是单峰，或最小值落在搜索边界。
    """
    lo, hi = search_range
    if not lo < hi:
        raise InvalidInput(f"搜索区间无效: [{lo}, {hi}]")
    grid = np.linspace(lo, hi, config.FOCUS_COARSE_POINTS)
    variance = np.array([spot_variance(bundle, d) for d in grid])
    if not is_unimodal(-variance):
        raise NoConvergence(f"光斑尺寸在 [{lo:.4g}, {hi:.4g}] m 内不是单峰函数")
    k = int(np.argmin(variance))
    if k == 0 or k == grid.size - 1:
        raise NoConvergence(f"最佳聚焦位于搜索边界 {grid[k]:.4g} m 处")

    step = grid[1] - grid[0]
    xtol = config.FOCUS_SEARCH_TOL / (2.0 * max(abs(grid[k]), step))
    objective = lambda d: spot_variance(bundle, float(d))
    try:
        result = minimize_scalar(objective, bracket=(grid[k - 1], grid[k], grid[k + 1]),
                                 method="golden", options={"xtol": xtol})
    except ValueError:
        # 相邻格点取值相等时不构成严格括号
        result = minimize_scalar(objective, bounds=(grid[k - 1], grid[k + 1]), method="bounded",
                                 options={"xatol": config.FOCUS_SEARCH_TOL})
    distance = float(result.x)
    return FocusResult(distance, math.sqrt(max(spot_variance(bundle, distance), 0.0)))


def trace_best_focus(scene: Scene, object_x: float, n_rays: int,
                     search_range: Tuple[float, float],
                     rng: Optional[np.random.Generator] = None) -> FocusResult:
    """
    追迹光线扇并返回最佳聚焦平面相对最后一个元件的距离与 RMS 光斑半径。
    负距离表示虚像。
    """
    if n_rays < config.MIN_RAY_COUNT:
        raise InvalidInput(f"光线数至少为 {config.MIN_RAY_COUNT}: {n_rays}")
    bundle = trace_scene(scene, object_x, n_rays, rng)
    result = locate_best_focus(bundle, search_range)
    logger.debug(f"最佳聚焦: 距离 {result.distance:.6e} m, RMS 光斑 {result.rms_spot:.3e} m")
    return result


def _image_centroid(scene: Scene, object_x: float, n_rays: int, distance: float) -> float:
    bundle = trace_scene(scene, object_x, n_rays)
    mask = bundle.active
    positions = bundle.x[mask] + distance * bundle.slope[mask]
    return float(np.sum(bundle.weight[mask] * positions) / np.sum(bundle.weight[mask]))


def trace_magnification(scene: Scene, image_distance: float, object_points: Tuple[float, float],
                        n_rays: int = config.DEFAULT_RAY_COUNT) -> float:
    """由两个物点的像质心计算带符号的横向放大率。"""
    x1, x2 = object_points
    if x1 == x2:
        raise InvalidInput("两个物点必须不同")
    y1 = _image_centroid(scene, x1, n_rays, image_distance)
    y2 = _image_centroid(scene, x2, n_rays, image_distance)
    return (y2 - y1) / (x2 - x1)