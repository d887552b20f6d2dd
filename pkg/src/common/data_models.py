# src/common/data_models.py
"""
项目中统一使用的数据模型
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple, Union

import numpy as np
from scipy import constants

from src.common import config
from src.common.errors import InvalidInput


# --- 运动学 ---

@dataclass(frozen=True)
class PhotonTriad:
    """
    泵浦/信号/闲频三光子角频率 (rad/s)，满足能量守恒 ω_p = ω_s + ω_i。
    波矢 (rad/m, 三维) 可选，给出时须满足 k_p − k_s − k_i = 0。
    """
    omega_p: float
    omega_s: float
    omega_i: float
    k_p: Optional[Tuple[float, float, float]] = None
    k_s: Optional[Tuple[float, float, float]] = None
    k_i: Optional[Tuple[float, float, float]] = None

    def __post_init__(self):
        if min(self.omega_p, self.omega_s, self.omega_i) <= 0:
            raise InvalidInput(f"三光子频率必须为正: {self}")
        residual = abs(self.omega_p - self.omega_s - self.omega_i)
        if residual > 4 * np.spacing(self.omega_p):
            raise InvalidInput(f"能量不守恒，残差 {residual:.3e} rad/s")
        vectors = (self.k_p, self.k_s, self.k_i)
        if any(v is not None for v in vectors):
            if any(v is None for v in vectors):
                raise InvalidInput("三个波矢须同时给出")
            if any(p - s - i != 0 for p, s, i in zip(*vectors)):
                raise InvalidInput("动量不守恒: k_p − k_s − k_i ≠ 0")


@dataclass(frozen=True)
class ReflectionGeometry:
    """量子镜反射几何：信号入射角与闲频反射角，均相对泵浦方向，取值 [0, π/2]。"""
    theta_ps: float
    theta_pi: float

    def __post_init__(self):
        for angle in (self.theta_ps, self.theta_pi):
            if not 0.0 <= angle <= math.pi / 2:
                raise InvalidInput(f"反射几何角度必须位于 [0, π/2]: {angle}")


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = constants.c
    eps0: float = constants.epsilon_0


# --- 非线性晶体与高斯光束 ---

@dataclass(frozen=True)
class CrystalConfig:
    """
    非线性晶体参数。d_eff 单位 m/V，alpha 为闲频光强度吸收系数 (1/m)，
    miller 为准相位匹配的 Miller 因子 (已计入 d_eff，此处保留以便报告)。
    """
    length: float
    n_p: float
    n_s: float
    n_i: float
    d_eff: float
    alpha: float = 0.0
    miller: float = 1.0

    def __post_init__(self):
        if self.length <= 0:
            raise InvalidInput(f"晶体长度必须为正: {self.length}")
        if min(self.n_p, self.n_s, self.n_i) < 1:
            raise InvalidInput("折射率必须不小于 1")
        if self.d_eff <= 0:
            raise InvalidInput(f"有效非线性系数必须为正: {self.d_eff}")
        if not 0 < self.miller <= 1:
            raise InvalidInput(f"Miller 因子必须位于 (0, 1]: {self.miller}")
        if self.alpha < 0:
            raise InvalidInput(f"吸收系数不能为负: {self.alpha}")


@dataclass(frozen=True)
class GaussianBeam:
    """
    介质内的 TEM00 高斯光束。共焦参数 b = k·w₀² 由束腰和介质波数导出。
    """
    power: float
    waist: float
    wavelength_vac: float
    index: float = 1.0
    beam_quality: float = 1.0

    def __post_init__(self):
        if self.power < 0:
            raise InvalidInput(f"光束功率不能为负: {self.power}")
        if self.waist <= 0 or self.wavelength_vac <= 0:
            raise InvalidInput("束腰和波长必须为正")
        if self.index < 1 or self.beam_quality < 1:
            raise InvalidInput("折射率与 M² 必须不小于 1")

    @property
    def wavenumber(self) -> float:
        return 2 * math.pi * self.index / self.wavelength_vac

    @property
    def confocal(self) -> float:
        return self.wavenumber * self.waist ** 2


class FocusingVariant(str, Enum):
    """聚焦函数的两种积分区间约定"""
    CANONICAL = "canonical"   # 束腰位于晶体入射面, τ ∈ [0, 2ξ]
    CENTERED = "centered"     # 束腰位于晶体中心, τ ∈ [−ξ, ξ]


@dataclass(frozen=True)
class FocusingInput:
    mu: float
    xi: float
    dk_half_b: float = 0.0

    def __post_init__(self):
        if not 0 < self.mu < 1:
            raise InvalidInput(f"μ = k_s/k_p 必须位于 (0, 1): {self.mu}")
        if self.xi <= 0:
            raise InvalidInput(f"聚焦参数 ξ 必须为正: {self.xi}")


@dataclass(frozen=True)
class FocusingResult:
    """聚焦函数积分结果。imaginary 为与 h 同尺度的虚部残差。"""
    h: float
    error: float
    imaginary: float
    subdivisions: int


@dataclass(frozen=True)
class XiScanPoint:
    xi: float
    h: float
    dk_half_b: float


@dataclass
class FocusingOptimum:
    """最佳聚焦搜索结果，附带粗扫描曲线"""
    xi: float
    h: float
    dk_half_b: float
    scan: List[XiScanPoint] = field(default_factory=list)


# --- 几何光学 ---

@dataclass(frozen=True)
class Ray:
    """近轴光线。slope 为 dx/dz，精确模式下解释为 tan θ。"""
    x: float
    slope: float
    wavelength_vac: float
    weight: float = 1.0
    paraxial_violation: bool = False


@dataclass(frozen=True)
class FreeSpace:
    distance: float

    def __post_init__(self):
        if self.distance < 0:
            raise InvalidInput(f"自由传播距离不能为负: {self.distance}")


@dataclass(frozen=True)
class ThinLens:
    focal_length: float

    def __post_init__(self):
        if self.focal_length == 0 or not math.isfinite(self.focal_length):
            raise InvalidInput(f"焦距必须为非零有限值: {self.focal_length}")


@dataclass(frozen=True)
class Mask:
    """振幅透过率掩模，transmission(x) 取值必须位于 [0, 1]。"""
    transmission: Callable[[np.ndarray], np.ndarray]
    label: str = "mask"


@dataclass(frozen=True)
class QuantumMirror:
    """
    非线性晶体等效的量子镜。pump_radius 为泵浦波前曲率半径，
    正值表示发散，math.inf 表示平面泵浦。
    """
    pump_wavelength: float
    pump_radius: float = math.inf

    def __post_init__(self):
        if self.pump_wavelength <= 0:
            raise InvalidInput(f"泵浦波长必须为正: {self.pump_wavelength}")
        if self.pump_radius == 0:
            raise InvalidInput("泵浦曲率半径不能为零")


Element = Union[FreeSpace, ThinLens, Mask, QuantumMirror]


class Frame(str, Enum):
    """闲频光线的坐标约定"""
    UNFOLDED = "unfolded"   # Klyshko 展开图，晶体等效为反射镜
    FOLDED = "folded"       # 实验室坐标，闲频与信号同向传播


@dataclass(frozen=True)
class QmInteractions:
    """量子镜处记录的逐光线角度 (rad) 与频率，用于守恒律校验。"""
    theta_s: np.ndarray
    theta_i: np.ndarray
    theta_p: np.ndarray
    omega_s: np.ndarray
    omega_i: np.ndarray


@dataclass
class ImagingSetup:
    """
    成像几何参数 (单位 m)。薄透镜鬼成像使用 S1/f/d1/d2，
    球面量子镜使用 a/b/R。M 为横向放大率。
    """
    S1: Optional[float] = None
    f: Optional[float] = None
    d1: Optional[float] = None
    d2: Optional[float] = None
    a: Optional[float] = None
    b: Optional[float] = None
    R: Optional[float] = None
    M: Optional[float] = None


class FocusResult(NamedTuple):
    distance: float
    rms_spot: float


# --- 波动光学 ---

@dataclass
class Field1D:
    """
    一维均匀网格上的复标量场，x_j = origin + j·dx。
    """
    samples: np.ndarray
    dx: float
    wavelength_vac: float
    origin: float = 0.0

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        n = self.samples.size
        if self.samples.ndim != 1 or n < 2 or n % 2:
            raise InvalidInput(f"采样点数必须为不小于 2 的偶数: {n}")
        if self.dx <= 0 or self.wavelength_vac <= 0:
            raise InvalidInput("采样间隔与波长必须为正")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidInput("场中存在非有限值")

    @property
    def size(self) -> int:
        return self.samples.size

    @property
    def x(self) -> np.ndarray:
        return self.origin + self.dx * np.arange(self.size)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.samples) ** 2

    @property
    def power(self) -> float:
        return float(np.sum(self.intensity) * self.dx)

    def with_samples(self, samples: np.ndarray, wavelength_vac: Optional[float] = None) -> "Field1D":
        return Field1D(samples, self.dx,
                       self.wavelength_vac if wavelength_vac is None else wavelength_vac,
                       self.origin)


@dataclass(frozen=True)
class SourceSpec:
    """信号臂光源。kind 取 plane / point / gaussian。"""
    kind: str
    wavelength: float
    waist: Optional[float] = None
    position: float = 0.0


@dataclass(frozen=True)
class DetectorSettings:
    mode: str = "coincidence"
    background: float = 0.0
    half_width: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("singles", "coincidence"):
            raise InvalidInput(f"未知探测模式: {self.mode}")
        if self.background < 0:
            raise InvalidInput(f"背景强度不能为负: {self.background}")


@dataclass(frozen=True)
class Scene:
    """
    一条完整光路：信号臂元件、唯一的量子镜、闲频臂元件，按传播顺序排列。
    """
    elements: Tuple[Element, ...]
    source: Optional[SourceSpec] = None
    detector: DetectorSettings = field(default_factory=DetectorSettings)
    grid_size: int = config.DEFAULT_GRID_SIZE
    dx: float = config.DEFAULT_GRID_STEP
    frame: Frame = Frame.UNFOLDED
    exact: bool = False
    fan_half_angle: float = config.DEFAULT_FAN_HALF_ANGLE

    def validate(self) -> "Scene":
        """检查光路恰好包含一个量子镜。"""
        self.mirror_index
        return self

    @property
    def mirror_index(self) -> int:
        indices = [i for i, e in enumerate(self.elements) if isinstance(e, QuantumMirror)]
        if len(indices) != 1:
            raise InvalidInput(f"光路中必须恰好包含一个量子镜，当前 {len(indices)} 个")
        return indices[0]

    @property
    def mirror(self) -> QuantumMirror:
        return self.elements[self.mirror_index]


@dataclass(frozen=True)
class FringeReport:
    period: float
    visibility: float
    i_max: float
    i_min: float
    extrema_count: int


@dataclass
class SceneResult:
    x: np.ndarray
    intensity: np.ndarray
    idler_wavelength: float
    fringes: Optional[FringeReport] = None


@dataclass(frozen=True)
class VisibilityModel:
    """受激下转换可见度模型，N = β⟨n⟩。"""
    beta: float
    mean_photon: float

    def __post_init__(self):
        if self.beta <= 0 or self.mean_photon < 0:
            raise InvalidInput(f"可见度模型参数无效: β={self.beta}, ⟨n⟩={self.mean_photon}")

    @property
    def occupation(self) -> float:
        return self.beta * self.mean_photon


# --- 场景文档 ---

@dataclass(frozen=True)
class ElementSpec:
    """场景文档中的一个光学元件。values 为国际单位制数值。"""
    kind: str
    values: Tuple[float, ...] = ()
    path: Optional[str] = None


@dataclass(frozen=True)
class RunSection:
    name: str = "unnamed"
    engine: str = "ray"
    seed: int = 0
    rays: int = config.DEFAULT_RAY_COUNT
    grid: int = config.DEFAULT_GRID_SIZE
    frame: str = "unfolded"
    exact: bool = False
    fan: float = config.DEFAULT_FAN_HALF_ANGLE


@dataclass(frozen=True)
class PumpSection:
    wavelength: Optional[float] = None
    radius: float = math.inf
    power: Optional[float] = None
    confocal: Optional[float] = None
    beam_quality: float = 1.0


@dataclass(frozen=True)
class CrystalSection:
    length: Optional[float] = None
    n_p: float = 1.0
    n_s: float = 1.0
    n_i: float = 1.0
    d_raw: Optional[float] = None
    miller: float = 1.0
    alpha: float = 0.0
    calibration: float = 1.0
    mismatch: float = 0.0
    variant: str = "canonical"


@dataclass(frozen=True)
class ArmSection:
    elements: Tuple[ElementSpec, ...] = ()
    wavelength: Optional[float] = None
    power: Optional[float] = None
    beam_quality: float = 1.0
    source: str = "point"
    waist: Optional[float] = None
    object_x: float = 0.0


@dataclass(frozen=True)
class DetectorSection:
    mode: str = "coincidence"
    background: float = 0.0
    half_width: Optional[float] = None
    dx: Optional[float] = None
    search_min: Optional[float] = None
    search_max: Optional[float] = None
    z_min: Optional[float] = None
    z_max: Optional[float] = None
    z_points: int = 0
    reference_power: Optional[float] = None


@dataclass(frozen=True)
class SweepSection:
    mu: Optional[float] = None
    xi_min: float = 0.05
    xi_max: float = 6.0
    points: int = 60
    optimize_dk: bool = True
    beta: float = 7.74e-7
    mean_photon_min: float = 1.0
    mean_photon_max: float = 1e8


@dataclass(frozen=True)
class Scenario:
    """
    解析后的场景文档。各段落对应文档中的 [run] / [pump] / [crystal] /
    [arm.signal] / [arm.idler] / [detector] / [sweep]。
    """
    run: RunSection = field(default_factory=RunSection)
    pump: PumpSection = field(default_factory=PumpSection)
    crystal: CrystalSection = field(default_factory=CrystalSection)
    signal: ArmSection = field(default_factory=ArmSection)
    idler: ArmSection = field(default_factory=ArmSection)
    detector: DetectorSection = field(default_factory=DetectorSection)
    sweep: SweepSection = field(default_factory=SweepSection)


# --- 运行结果 ---

@dataclass
class OutputTable:
    """待写出的曲线数据 (CSV)"""
    columns: List[str]
    rows: np.ndarray


@dataclass
class OutputImage:
    """待写出的二维图 (PGM)，附带坐标轴说明"""
    values: np.ndarray
    axes: Dict[str, Tuple[float, float]] = field(default_factory=dict)


@dataclass
class RunReport:
    """
    场景运行报告。wall_time 仅用于终端展示，不写入结果文件。
    """
    scenario: str
    engine: str
    version: str
    seed: int
    quantities: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    wall_time: float = 0.0
    tables: Dict[str, OutputTable] = field(default_factory=dict)
    images: Dict[str, OutputImage] = field(default_factory=dict)
