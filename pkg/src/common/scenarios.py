# src/common/scenarios.py
"""
集中管理内置的标准场景文档及其验收区间。
"""
from typing import Dict, Tuple

STRY_DFG = """
# PPLN 差频: 812 nm 二极管泵浦 + 1064 nm Nd:YAG 信号 → 3.43 µm 中红外闲频
# 两束光共焦参数 24 mm，M² = 1.15；晶体吸收按 0.04 /cm 估计
[run]
name = stry-dfg
engine = dfg

[pump]
wavelength = 812 nm
power = 120 mW
confocal = 24 mm
beam_quality = 1.15

[crystal]
length = 50 mm
n_p = 2.175
n_s = 2.156
n_i = 2.085
d_raw = 27 pm/V
miller = 0.85
alpha = 0.04 1/cm
mismatch = 0 1/m
variant = canonical

[arm.signal]
wavelength = 1064 nm
power = 980 mW
beam_quality = 1.15

[detector]
reference_power = 0.1176 mW
"""

PITTMAN_LENS = """
# 简并鬼成像: 物距 600 mm，f = 400 mm 透镜位于信号臂，晶体距透镜 400 mm
[run]
name = pittman-lens
engine = ray
seed = 7
rays = 512
fan = 0.002

[pump]
wavelength = 351.1 nm
radius = plane

[arm.signal]
wavelength = 702.2 nm
object_x = 0 mm
element = free 600 mm
element = lens 400 mm
element = free 400 mm

[detector]
search_min = 100 mm
search_max = 2000 mm
"""

SQM_LAW = """
# 球面量子镜: 532 nm 发散泵浦 (R = 100 mm)，800 nm 点物位于镜前 80 mm
[run]
name = sqm-law
engine = ray
seed = 11
rays = 512
fan = 0.01

[pump]
wavelength = 532 nm
radius = 100 mm

[arm.signal]
wavelength = 800 nm
object_x = 0 mm
element = free 80 mm

[detector]
search_min = 50 mm
search_max = 500 mm
"""

YOUNG_VISIBILITY = """
# 受激下转换控制的杨氏双缝可见度，N = β⟨n⟩
[run]
name = young-visibility
engine = visibility
grid = 131072

[arm.signal]
wavelength = 800 nm
element = slits 200 um 20 um

[arm.idler]
element = free 500 mm

[detector]
half_width = 5 mm
dx = 2.5 um

[sweep]
beta = 7.74e-7
mean_photon_min = 1000
mean_photon_max = 1e9
points = 61
"""

GHOST_DOUBLESLIT = """
# 鬼干涉: 双缝置于晶体处 (d_a = 0)，简并平面泵浦，闲频臂传播 500 mm
[run]
name = ghost-doubleslit
engine = wave
grid = 131072

[pump]
wavelength = 400 nm
radius = plane

[arm.signal]
wavelength = 800 nm
source = plane
element = slits 200 um 10 um

[arm.idler]
element = free 500 mm

[detector]
mode = coincidence
background = 1.0
half_width = 5 mm
dx = 2.5 um
z_min = 100 mm
z_max = 500 mm
z_points = 41
"""

SQM_WAVE_FOCUS = """
# 球面量子镜的波动成像: 532 nm 会聚泵浦 (R = 300 mm)，800 nm 点源位于镜前 80 mm，
# 闲频光在折叠坐标系中会聚成实像，与光线追迹的最佳聚焦对照
[run]
name = sqm-wave-focus
engine = wave
seed = 5
grid = 16384
rays = 512
fan = 0.01

[pump]
wavelength = 532 nm
radius = 300 mm

[arm.signal]
wavelength = 800 nm
source = point
waist = 10 um
object_x = 0 mm
element = free 80 mm

[arm.idler]
element = free 67 mm

[detector]
mode = coincidence
half_width = 5 mm
dx = 2 um
z_min = 40 mm
z_max = 100 mm
z_points = 61
"""

DFG_XI_SCAN = """
# 最佳聚焦扫描: μ = 0.5，对 Δk 取最优
[run]
name = dfg-xi-scan
engine = focusing

[crystal]
variant = canonical

[sweep]
mu = 0.5
xi_min = 0.05
xi_max = 6.0
points = 60
optimize_dk = true
"""

CANNED_SCENARIOS: Dict[str, str] = {
    "stry-dfg": STRY_DFG,
    "pittman-lens": PITTMAN_LENS,
    "sqm-law": SQM_LAW,
    "young-visibility": YOUNG_VISIBILITY,
    "ghost-doubleslit": GHOST_DOUBLESLIT,
    "dfg-xi-scan": DFG_XI_SCAN,
    "sqm-wave-focus": SQM_WAVE_FOCUS,
}

# 验收区间: 场景名 -> {报告量: (下限, 上限)}
EXPECTATIONS: Dict[str, Dict[str, Tuple[float, float]]] = {
    "stry-dfg": {
        "idler_wavelength": (3.40e-6, 3.46e-6),
        "efficiency_reference": (0.019, 0.021),
        "power_ratio": (1.0 / 3.0, 3.0),
    },
    "pittman-lens": {
        "image_distance_unfolded": (1.2 - 1e-5, 1.2 + 1e-5),
        "magnification_abs": (1.98, 2.02),
    },
    "sqm-law": {
        "image_distance": (0.1980, 0.1990),
    },
    "young-visibility": {
        "visibility_at_unit_occupation": (0.5 - 1e-12, 0.5 + 1e-12),
    },
    "ghost-doubleslit": {
        "fringe_period": (2.0e-3 - 2.5e-6, 2.0e-3 + 2.5e-6),
    },
    "dfg-xi-scan": {
        "xi_star": (0.8, 2.0),
    },
    "sqm-wave-focus": {
        "sharpest_plane": (0.0655, 0.0685),
        "ray_best_focus": (0.06725, 0.06731),
    },
}


def describe_scenarios() -> Dict[str, str]:
    """场景名 -> 文档首行注释。"""
    descriptions = {}
    for name, text in CANNED_SCENARIOS.items():
        first = next((line for line in text.splitlines() if line.startswith("#")), "#")
        descriptions[name] = first.lstrip("# ").strip()
    return descriptions
