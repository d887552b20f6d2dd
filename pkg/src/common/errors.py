# src/common/errors.py
"""
统一的异常定义。每个异常类声明其对应的CLI退出码。
"""
from typing import Optional


class QMirrorError(Exception):
    """所有领域异常的基类"""
    exit_code: int = 3


class InvalidInput(QMirrorError, ValueError):
    """输入参数超出定义域"""


class NonPositiveIdler(QMirrorError):
    """信号频率不低于泵浦频率，闲频光频率非正"""


class NoPropagatingIdler(QMirrorError):
    """横向动量守恒无实数解：量子镜拒绝该信号光子"""

    def __init__(self, message: str, sine_value: float):
        super().__init__(message)
        self.sine_value = sine_value


class QuadratureFailure(QMirrorError):
    """自适应积分未能达到要求的相对容差"""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class MismatchedConfocal(QMirrorError):
    """泵浦与信号光束的共焦参数不一致"""


class ImageAtInfinity(QMirrorError):
    """成像方程左侧为零，像位于无穷远"""


class NoConvergence(QMirrorError):
    """光斑尺寸在搜索区间内不是单峰函数"""


class GridMismatch(QMirrorError):
    """两个场的采样网格不一致"""


class NoFringes(QMirrorError):
    """强度分布中的极值点不足以估计条纹"""


class EngineError(QMirrorError):
    """引擎错误，附带场景上下文"""

    def __init__(self, message: str, scenario: str):
        super().__init__(f"[{scenario}] {message}")
        self.scenario = scenario


class ParseError(QMirrorError):
    """场景文档语法错误，带行号与列号"""
    exit_code = 2

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"第 {line} 行, 第 {column} 列: {message}")
        self.line = line
        self.column = column


class ValidationError(QMirrorError):
    """场景语义校验失败，指明被违反的不变量"""
    exit_code = 2

    def __init__(self, message: str, invariant: str, line: Optional[int] = None):
        super().__init__(f"{message} (不变量: {invariant})")
        self.invariant = invariant
        self.line = line


class OutputError(QMirrorError):
    """结果文件写入失败"""
    exit_code = 4


class AliasingRisk(UserWarning):
    """角谱传播核在有效带宽内的相位步进超过π"""
