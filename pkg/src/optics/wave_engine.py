# src/optics/wave_engine.py
"""
一维标量波动光学引擎：角谱传播、薄元件、薄晶体量子镜转换与探测模型。

传播使用周期边界的角谱法 (不补零)，因此 z₁ 与 z₂ 的传播严格可组合且功率守恒；
窗口应足够大，使场在传播后不触及边界。
"""
import math
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import fft

from src.common import config
from src.common.data_models import (DetectorSettings, Element, Field1D, FreeSpace, Mask, QuantumMirror,
                                    Scene, SceneResult, SourceSpec, ThinLens)
from src.common.errors import AliasingRisk, GridMismatch, InvalidInput, NoConvergence, NoFringes
from src.common.logger import logger
from src.analysis.fringes import fringe_analysis, visibility_vs_occupation
from src.physics.kinematics import idler_wavelength


# --- 场的构造 ---

def centered_grid(size: int, dx: float) -> Tuple[int, float, float]:
    """返回以 0 为中心的网格 (size, dx, origin)。"""
    if size < 2 or size % 2:
        raise InvalidInput(f"采样点数必须为不小于 2 的偶数: {size}")
    return size, dx, -0.5 * size * dx


def plane_wave(size: int, dx: float, wavelength: float, amplitude: complex = 1.0) -> Field1D:
    _, _, origin = centered_grid(size, dx)
    return Field1D(np.full(size, amplitude, dtype=np.complex128), dx, wavelength, origin)


def tilted_plane_wave(size: int, dx: float, wavelength: float, angle: float) -> Field1D:
    """exp(i·k·sin θ·x)，θ 为相对光轴的倾角。"""
    field = plane_wave(size, dx, wavelength)
    kx = 2 * math.pi / wavelength * math.sin(angle)
    return field.with_samples(np.exp(1j * kx * field.x))


def gaussian_field(size: int, dx: float, wavelength: float, waist: float,
                   center: float = 0.0) -> Field1D:
    """束腰处的高斯场 exp(−(x−x₀)²/w₀²)。"""
    if waist <= 0:
        raise InvalidInput(f"束腰必须为正: {waist}")
    field = plane_wave(size, dx, wavelength)
    return field.with_samples(np.exp(-((field.x - center) / waist) ** 2))


def point_source_field(size: int, dx: float, wavelength: float, center: float = 0.0,
                       waist: Optional[float] = None) -> Field1D:
    """近似点光源：宽度为数个采样间隔的窄高斯。"""
    return gaussian_field(size, dx, wavelength, waist or 3.0 * dx, center)


def slit_mask(centres: Sequence[float], width: float, label: str = "slits") -> Mask:
    """宽度为 width 的若干狭缝，狭缝内透过率为 1。"""
    if width <= 0:
        raise InvalidInput(f"狭缝宽度必须为正: {width}")
    centres = tuple(float(c) for c in centres)

    def transmission(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        inside = np.zeros(x.shape, dtype=bool)
        for c in centres:
            inside |= np.abs(x - c) <= 0.5 * width
        return inside.astype(float)

    return Mask(transmission, label)


def double_slit_mask(separation: float, width: float) -> Mask:
    return slit_mask((-0.5 * separation, 0.5 * separation), width, label="double-slit")


def tabulated_mask(positions: np.ndarray, values: np.ndarray, label: str = "file") -> Mask:
    """由 (x, t) 表格线性插值的透过率，表外为 0。"""
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    if positions.size < 2 or np.any(np.diff(positions) <= 0):
        raise InvalidInput("掩模坐标必须严格递增且至少两个点")
    if np.any(values < 0) or np.any(values > 1):
        raise InvalidInput("掩模透过率必须位于 [0, 1]")
    return Mask(lambda x: np.interp(x, positions, values, left=0.0, right=0.0), label)


def pump_field(mirror: QuantumMirror, template: Field1D) -> Field1D:
    """
    在信号网格上生成泵浦场：平面泵浦为常数，球面泵浦带相位 exp(+i·k_p·x²/(2R))，R > 0 为发散。
    """
    x = template.x
    if math.isinf(mirror.pump_radius):
        samples = np.ones(template.size, dtype=np.complex128)
    else:
        k_p = 2 * math.pi / mirror.pump_wavelength
        samples = np.exp(1j * k_p * x ** 2 / (2 * mirror.pump_radius))
    return Field1D(samples, template.dx, mirror.pump_wavelength, template.origin)


# --- 传播 ---

def _kernel_phase_step(field: Field1D, spectrum: np.ndarray, frequencies: np.ndarray,
                       distance: float) -> float:
    """有效带宽边缘处相邻频率采样间二次核相位的增量。"""
    power = np.abs(spectrum) ** 2
    peak = float(np.max(power))
    if peak == 0:
        return 0.0
    occupied = np.abs(frequencies[power > config.SPECTRUM_FLOOR * peak])
    f_edge = float(np.max(occupied))
    df = 1.0 / (field.size * field.dx)
    return math.pi * field.wavelength_vac * distance * (2 * f_edge * df + df ** 2)


def fresnel_propagate(field: Field1D, distance: float) -> Field1D:
    """
    角谱法传播 distance (m)。传播波分量乘以 exp(ikz·√(1−(λf)²))，倏逝分量指数衰减。

    Raises:
        AliasingRisk (警告): 二次核相位在占用带宽内每采样超过 π。
    """
    if distance < 0:
        raise InvalidInput(f"传播距离不能为负: {distance}")
    if distance == 0:
        return field.with_samples(field.samples.copy())

    spectrum = fft.fft(field.samples)
    frequencies = fft.fftfreq(field.size, field.dx)
    step = _kernel_phase_step(field, spectrum, frequencies, distance)
    if step > math.pi:
        warnings.warn(f"角谱核相位步进 {step:.2f} rad 超过 π (z={distance:.4g} m)", AliasingRisk,
                      stacklevel=2)
        logger.warning(f"传播 {distance:.4g} m 存在混叠风险，相位步进 {step:.2f} rad")

    k = 2 * math.pi / field.wavelength_vac
    argument = 1.0 - (field.wavelength_vac * frequencies) ** 2
    root = np.sqrt(np.abs(argument))
    kernel = np.where(argument >= 0, np.exp(1j * k * distance * root), np.exp(-k * distance * root))
    return field.with_samples(fft.ifft(spectrum * kernel))


def apply_element(field: Field1D, element: Element) -> Field1D:
    """掩模乘透过率，薄透镜乘二次相位 exp(−iπx²/(λf))，自由空间做角谱传播。"""
    if isinstance(element, Mask):
        transmission = np.asarray(element.transmission(field.x), dtype=float)
        if np.any(transmission < 0) or np.any(transmission > 1):
            raise InvalidInput(f"掩模 {element.label} 的透过率超出 [0, 1]")
        return field.with_samples(field.samples * transmission)
    if isinstance(element, ThinLens):
        phase = -math.pi * field.x ** 2 / (field.wavelength_vac * element.focal_length)
        return field.with_samples(field.samples * np.exp(1j * phase))
    if isinstance(element, FreeSpace):
        return fresnel_propagate(field, element.distance)
    raise InvalidInput(f"波动引擎不支持直接应用元件 {type(element).__name__}")


def qm_convert(signal: Field1D, pump: Field1D, lambda_p: float,
               coupling: float = config.QM_COUPLING) -> Field1D:
    """
    薄晶体量子镜: E_i(x) = κ·E_p(x)·conj(E_s(x))，输出波长由能量守恒给出。

    Raises:
        GridMismatch: 信号与泵浦网格不一致。
    """
    if signal.size != pump.size or signal.dx != pump.dx or signal.origin != pump.origin:
        raise GridMismatch(f"信号网格 ({signal.size}, {signal.dx}, {signal.origin}) 与泵浦网格 "
                           f"({pump.size}, {pump.dx}, {pump.origin}) 不一致")
    wavelength_i = idler_wavelength(lambda_p, signal.wavelength_vac)
    idler = Field1D(coupling * pump.samples * np.conj(signal.samples), signal.dx,
                    wavelength_i, signal.origin)
    return idler


# --- 扫描与探测 ---

def z_scan(field: Field1D, distances: Sequence[float]) -> np.ndarray:
    """强度图，每行对应一个传播距离。"""
    return np.array([fresnel_propagate(field, d).intensity for d in distances])


def sharpness(intensity: np.ndarray) -> float:
    """归一化强度二阶矩 ΣI²/(ΣI)²，能量越集中值越大。"""
    intensity = np.asarray(intensity, dtype=float)
    total = float(np.sum(intensity))
    if total <= 0:
        return 0.0
    return float(np.sum(intensity ** 2)) / total ** 2


def locate_sharpest_plane(field: Field1D, distances: Sequence[float]) -> Tuple[float, np.ndarray]:
    """
    以归一化强度二阶矩为判据寻找像平面。

    Returns:
        (最清晰平面的距离, 各距离的清晰度)

    Raises:
        NoConvergence: 清晰度最大值落在扫描边界，扫描范围内没有像平面。
    """
    distances = np.asarray(distances, dtype=float)
    if distances.size == 0:
        raise InvalidInput("距离序列不能为空")
    metric = np.array([sharpness(fresnel_propagate(field, d).intensity) for d in distances])
    k = int(np.argmax(metric))
    if k == 0 or k == distances.size - 1:
        raise NoConvergence(f"清晰度最大值位于扫描边界 {distances[k]:.4g} m")
    return float(distances[k]), metric


def apply_detection(intensity: np.ndarray, mode: str, background: float) -> np.ndarray:
    """单计数模式叠加均匀背景 B·mean(I)；符合计数模式去除背景。"""
    intensity = np.asarray(intensity, dtype=float)
    if background < 0:
        raise InvalidInput(f"背景强度不能为负: {background}")
    if mode == "coincidence":
        return intensity.copy()
    if mode == "singles":
        return intensity + background * float(np.mean(intensity))
    raise InvalidInput(f"未知探测模式: {mode}")


def _source_field(source: SourceSpec, size: int, dx: float) -> Field1D:
    if source.kind == "plane":
        return plane_wave(size, dx, source.wavelength)
    if source.kind == "gaussian":
        if source.waist is None:
            raise InvalidInput("高斯光源需要指定束腰")
        return gaussian_field(size, dx, source.wavelength, source.waist, source.position)
    if source.kind == "point":
        return point_source_field(size, dx, source.wavelength, source.position, source.waist)
    raise InvalidInput(f"未知光源类型: {source.kind}")


def _check_mask_fill(field: Field1D, mask: Mask):
    support = np.nonzero(np.asarray(mask.transmission(field.x)) > 0)[0]
    if support.size == 0:
        return
    extent = (support[-1] - support[0] + 1) * field.dx
    window = field.size * field.dx
    if extent > config.MASK_FILL_LIMIT * window:
        logger.warning(f"掩模 {mask.label} 占窗口 {extent / window:.0%}，超过 {config.MASK_FILL_LIMIT:.0%}，"
                       f"周期边界可能引入回绕")


def run_field_chain(scene: Scene) -> Field1D:
    """按顺序执行光路，返回探测面上的闲频场。"""
    scene.validate()
    if scene.source is None:
        raise InvalidInput("光路缺少信号光源定义")
    field = _source_field(scene.source, scene.grid_size, scene.dx)
    for element in scene.elements:
        if isinstance(element, QuantumMirror):
            field = qm_convert(field, pump_field(element, field), element.pump_wavelength)
        else:
            if isinstance(element, Mask):
                _check_mask_fill(field, element)
            field = apply_element(field, element)
    return field


def detect(field: Field1D, detector: DetectorSettings, mode: Optional[str] = None) -> SceneResult:
    """在探测窗口内按探测模式生成强度分布；若存在条纹则附带条纹分析。"""
    mode = mode or detector.mode
    x = field.x
    intensity = field.intensity
    if detector.half_width is not None:
        window = np.abs(x) <= detector.half_width
        x, intensity = x[window], intensity[window]
    detected = apply_detection(intensity, mode, detector.background)

    report = None
    try:
        report = fringe_analysis(detected, field.dx)
    except NoFringes as e:
        logger.info(f"探测窗口内未检测到条纹: {e}")
    return SceneResult(x=x, intensity=detected, idler_wavelength=field.wavelength_vac, fringes=report)


def simulate_scene(scene: Scene, mode: Optional[str] = None) -> SceneResult:
    """运行光路并返回探测结果。"""
    return detect(run_field_chain(scene), scene.detector, mode)


def stimulated_fringe_pattern(size: int, dx: float, wavelength: float, separation: float,
                              width: float, distance: float, mean_photon: float,
                              beta: float = config.STIMULATION_BETA,
                              model=None) -> Tuple[np.ndarray, np.ndarray]:
    """
    受激下转换双缝条纹：相干部分 |E₁+E₂|² 与非相干部分 |E₁|²+|E₂|² 按可见度模型 V(N) 混合，
    N = β·⟨n⟩。

    Returns:
        (x, 强度)
    """
    visibility = visibility_vs_occupation(mean_photon, beta, model)
    base = plane_wave(size, dx, wavelength)
    fields = []
    for centre in (-0.5 * separation, 0.5 * separation):
        aperture = apply_element(base, slit_mask((centre,), width))
        fields.append(fresnel_propagate(aperture, distance).samples)
    coherent = np.abs(fields[0] + fields[1]) ** 2
    incoherent = np.abs(fields[0]) ** 2 + np.abs(fields[1]) ** 2
    return base.x, visibility * coherent + (1.0 - visibility) * incoherent
