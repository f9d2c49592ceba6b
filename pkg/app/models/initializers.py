import numpy as np


def glorot_uniform(
    rng: np.random.Generator, fan_in: int, fan_out: int, shape: tuple[int, ...] | None = None
) -> np.ndarray:
    """Uniform in ±sqrt(6 / (fan_in + fan_out))"""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape or (fan_in, fan_out))


def zeros(*shape: int) -> np.ndarray:
    return np.zeros(shape, dtype=np.float64)
