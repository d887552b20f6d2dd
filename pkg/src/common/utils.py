# src/common/utils.py
import time
import functools
import numpy as np
from src.common import config
from src.common.logger import logger

def log_duration(label: str):
    """
    Args:
        label (str): 日志中显示的阶段名称。
    """
    def decorator(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            started = time.perf_counter()
            result = func(*args, **kwargs)
            elapsed = time.perf_counter() - started
            logger.debug(f"{label} 完成，耗时 {elapsed:.3f} 秒")
            return result
        return wrapper
    return decorator

def worker_count(requested: int = 0) -> int:
    """返回实际使用的工作线程数，受 QMIRROR_THREADS / --threads 上限约束。"""
    cap = max(1, int(config.MAX_WORKERS))
    if requested and requested > 0:
        return min(requested, cap)
    return cap

def format_exception_detail(e: Exception) -> str:
    """
    将异常对象格式化为包含类型、参数和根本原因的详细字符串。
    """
    error_type = type(e).__name__
    error_args = e.args
    cause = getattr(e, '__cause__', None)
    cause_detail = ""
    if cause:
        cause_detail = f"\n  - Underlying Cause: {type(cause).__name__}{cause.args}"

    location = ""
    line = getattr(e, 'line', None)
    if line is not None:
        location = f"\n  - Line: {line}, Column: {getattr(e, 'column', 1)}"

    return (
        f"{error_type} - Args: {error_args}{location}{cause_detail}"
    )

def is_unimodal(values, rel_tol: float = 1e-6) -> bool:
    """序列先(非严格)上升到最大值，再(非严格)下降。"""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        return True
    slack = rel_tol * float(np.max(np.abs(values)))
    k = int(np.argmax(values))
    rising = np.all(np.diff(values[:k + 1]) >= -slack)
    falling = np.all(np.diff(values[k:]) <= slack)
    return bool(rising and falling)
