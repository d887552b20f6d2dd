# src/common/rng.py
"""
基于计数器的随机数生成器。每个 (seed, stream) 对应一个独立的 Philox 密钥，
因此结果与线程数和求值顺序无关。
"""
import numpy as np

# 流编号
STREAM_RAY_FAN = 0
STREAM_SCENE_SAMPLER = 1

_KEY_MASK = (1 << 64) - 1


def make_generator(seed: int, stream: int = STREAM_RAY_FAN) -> np.random.Generator:
    """为给定种子和流编号创建独立的随机数生成器。"""
    key = np.array([int(seed) & _KEY_MASK, int(stream) & _KEY_MASK], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
