import numpy as np

from app.schemas.data_schema import Dataset


def split_dataset(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded random (train, test) split"""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test fraction must lie in (0, 1), got {test_fraction}")
    order = np.random.default_rng(seed).permutation(len(dataset))
    cut = int(round(len(dataset) * test_fraction))
    return dataset.subset(np.sort(order[cut:])), dataset.subset(np.sort(order[:cut]))
