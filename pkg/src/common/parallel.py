# src/common/parallel.py
"""
有序的并行映射。结果按输入顺序返回，与线程数和完成顺序无关。
"""
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from src.common.logger import logger
from src.common.utils import worker_count

T = TypeVar("T")
R = TypeVar("R")

# 进度条开关 (CLI --quiet 时关闭)
SHOW_PROGRESS = True


def parallel_map(func: Callable[[T], R], items: Sequence[T], desc: str = "计算",
                 num_workers: Optional[int] = None) -> List[R]:
    """
    对 items 逐项调用 func，返回与输入等长、同序的结果列表。

    Args:
        func: 纯函数，不得依赖调用顺序。
        items: 输入序列。
        desc: 进度条标题。
        num_workers: 请求的线程数，受全局上限约束。
    """
    workers = worker_count(num_workers or 0)
    results: List[Optional[R]] = [None] * len(items)
    disable = (not SHOW_PROGRESS) or None

    with tqdm(total=len(items), desc=desc, disable=disable, leave=False) as progress_bar:
        if workers > 1 and len(items) > 1:
            # 并行模式
            with ThreadPoolExecutor(max_workers=workers) as executor:
                future_to_index = {executor.submit(func, item): i for i, item in enumerate(items)}
                for future in as_completed(future_to_index):
                    index = future_to_index[future]
                    try:
                        results[index] = future.result()
                    except Exception as exc:
                        logger.error(f"{desc}: 第 {index} 项计算失败: {exc}")
                        raise
                    progress_bar.update(1)
        else:
            # 串行模式
            for i, item in enumerate(items):
                results[i] = func(item)
                progress_bar.update(1)

    return results
