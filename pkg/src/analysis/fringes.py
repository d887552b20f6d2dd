# src/analysis/fringes.py
"""
条纹分析与受激下转换可见度模型。
"""
from typing import Callable, Dict, Tuple, Union

import numpy as np
from scipy import signal

from src.common import config
from src.common.data_models import FringeReport, VisibilityModel
from src.common.errors import InvalidInput, NoFringes

# 极值点的最小突出度 (相对强度跨度)，低于它的边缘衍射纹波不计为条纹
_PROMINENCE = 0.1


def _refine(values: np.ndarray, index: int) -> Tuple[float, float]:
    """三点抛物线插值，返回 (亚采样偏移, 顶点值)。"""
    if index <= 0 or index >= values.size - 1:
        return 0.0, float(values[index])
    y0, y1, y2 = values[index - 1], values[index], values[index + 1]
    curvature = y0 - 2 * y1 + y2
    if curvature == 0:
        return 0.0, float(y1)
    offset = 0.5 * (y0 - y2) / curvature
    return float(offset), float(y1 - 0.25 * (y0 - y2) * offset)


def fringe_analysis(intensity, dx: float) -> FringeReport:
    """
    估计条纹周期与可见度。

    周期为亚采样峰位置最小二乘直线的斜率；可见度取分析窗口中央 50% 内的极值。

    Raises:
        NoFringes: 极值点少于 3 个或峰少于 2 个。
    """
    values = np.asarray(intensity, dtype=float)
    if dx <= 0:
        raise InvalidInput(f"采样间隔必须为正: {dx}")
    span = float(np.max(values) - np.min(values)) if values.size else 0.0
    if values.size < 5 or span <= 0:
        raise NoFringes("强度分布为常数或采样过少")

    prominence = _PROMINENCE * span
    peaks, _ = signal.find_peaks(values, prominence=prominence)
    troughs, _ = signal.find_peaks(-values, prominence=prominence)
    if peaks.size + troughs.size < 3 or peaks.size < 2:
        raise NoFringes(f"极值点不足: {peaks.size} 个峰, {troughs.size} 个谷")

    peak_fit = [_refine(values, int(j)) for j in peaks]
    trough_fit = [_refine(-values, int(j)) for j in troughs]
    positions = (peaks + np.array([o for o, _ in peak_fit])) * dx
    period = float(np.polyfit(np.arange(positions.size), positions, 1)[0])

    lo, hi = 0.25 * values.size, 0.75 * values.size
    central_peaks = [v for j, (_, v) in zip(peaks, peak_fit) if lo <= j < hi]
    central_troughs = [-v for j, (_, v) in zip(troughs, trough_fit) if lo <= j < hi]
    if not central_peaks:
        central_peaks = [v for _, v in peak_fit]
    if not central_troughs:
        central_troughs = [-v for _, v in trough_fit] or [float(np.min(values))]

    i_max = max(central_peaks)
    i_min = max(min(central_troughs), 0.0)
    total = i_max + i_min
    visibility = 0.0 if total <= 0 else float(np.clip((i_max - i_min) / total, 0.0, 1.0))
    return FringeReport(period=period, visibility=visibility, i_max=i_max, i_min=i_min,
                        extrema_count=int(peaks.size + troughs.size))


# --- 可见度模型 ---

def _saturating(occupation):
    return occupation / (occupation + 1.0)


VISIBILITY_MODELS: Dict[str, Callable] = {
    "saturating": _saturating,
}

VisibilityCurve = Union[str, Callable, None]


def _resolve_model(model: VisibilityCurve) -> Callable:
    if model is None:
        return VISIBILITY_MODELS["saturating"]
    if callable(model):
        return model
    if model not in VISIBILITY_MODELS:
        raise InvalidInput(f"未知可见度模型: {model}")
    return VISIBILITY_MODELS[model]


def visibility_vs_occupation(mean_photon, beta: float = config.STIMULATION_BETA,
                             model: VisibilityCurve = None):
    """
    受激光子占据数 N = β·⟨n⟩ 对应的条纹可见度，默认模型 V = N/(N+1)。
    mean_photon 可为标量或数组。
    """
    if beta <= 0:
        raise InvalidInput(f"β 必须为正: {beta}")
    mean = np.asarray(mean_photon, dtype=float)
    if np.any(mean < 0):
        raise InvalidInput("平均光子数不能为负")
    curve = _resolve_model(model)
    result = np.clip(curve(beta * mean), 0.0, 1.0)
    return float(result) if result.ndim == 0 else result


def model_visibility(model: VisibilityModel, curve: VisibilityCurve = None) -> float:
    return visibility_vs_occupation(model.mean_photon, model.beta, curve)
