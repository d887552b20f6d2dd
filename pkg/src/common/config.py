# src/common/config.py
"""
项目统一配置文件。
"""
import os
from typing import Tuple

# --- 公共配置 ---

VERSION: str = "1.0.0"

# 基础路径配置
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
OUTPUT_DIR = os.path.join(BASE_DIR, 'output')

# 并发配置 (QMIRROR_THREADS 限制引擎并行度)
def _read_thread_cap() -> int:
    raw = os.environ.get("QMIRROR_THREADS", "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)

MAX_WORKERS: int = _read_thread_cap()

# 聚焦函数数值积分配置
QUAD_REL_TOL: float = 1e-8
QUAD_ABS_TOL: float = 1e-14
QUAD_MAX_SUBDIVISIONS: int = 20000
# 扫描/优化时使用的宽松容差
SCAN_REL_TOL: float = 1e-6

# 最佳聚焦优化配置
XI_SCAN_MIN: float = 0.05
XI_SCAN_MAX: float = 6.0
XI_COARSE_POINTS: int = 60
XI_REL_TOL: float = 1e-3
# Δk·b/2 粗扫描范围与步长
DK_SCAN_RANGE: Tuple[float, float] = (-0.5, 3.5)
DK_SCAN_STEP: float = 0.1

# 共焦参数一致性容差 (5%)
CONFOCAL_MATCH_TOL: float = 0.05
# 功率公式的无量纲校准系数
DFG_CALIBRATION: float = 1.0

# 光线追迹配置
PARAXIAL_SLOPE_LIMIT: float = 0.2
DEFAULT_RAY_COUNT: int = 512
MIN_RAY_COUNT: int = 100
DEFAULT_FAN_HALF_ANGLE: float = 0.01
FOCUS_SEARCH_TOL: float = 1e-6
FOCUS_COARSE_POINTS: int = 81

# 波动光学配置
DEFAULT_GRID_SIZE: int = 2 ** 14
DEFAULT_GRID_STEP: float = 2e-6
MASK_FILL_LIMIT: float = 0.25
QM_COUPLING: float = 1.0
# 判定频谱占用带宽的相对功率阈值
SPECTRUM_FLOOR: float = 1e-10

# 受激下转换可见度模型 (N = β⟨n⟩)
STIMULATION_BETA: float = 7.74e-7

# 输出格式配置
CSV_SIGNIFICANT_DIGITS: int = 17
PGM_MAXVAL: int = 65535

# 日志配置
LOG_LEVEL: str = os.environ.get("QMIRROR_LOG_LEVEL", "INFO").upper()
LOG_FORMAT: str = "%(asctime)s [%(levelname)-8s] %(message)s"
DATE_FORMAT: str = "%Y-%m-%d %H:%M:%S"
