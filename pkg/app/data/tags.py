from itertools import combinations

import numpy as np

from app.schemas.data_schema import MODALITIES, MissingPattern, Modality, Tag


def encode_tag(pattern: MissingPattern) -> Tag:
    """First digit 1 iff nothing is missing, then one flag per modality (v, a, t)"""
    flags = tuple(int(m in pattern) for m in MODALITIES)
    return Tag(digits=(int(pattern.is_complete), *flags))


def decode_tag(values: np.ndarray | list[float], threshold: float = 0.5) -> MissingPattern:
    """Recover the pattern from (possibly soft) tag digits"""
    digits = np.asarray(values, dtype=np.float64).reshape(-1)
    if digits.size != 4:
        raise ValueError(f"a tag has 4 digits, got {digits.size}")
    return MissingPattern(
        missing=frozenset(m for m, d in zip(MODALITIES, digits[1:]) if d >= threshold)
    )


def valid_patterns(among: tuple[Modality, ...] = MODALITIES) -> list[MissingPattern]:
    """Every pattern that leaves at least one of ``among`` present, empty first"""
    return [
        MissingPattern(missing=frozenset(combo))
        for size in range(len(among))
        for combo in combinations(among, size)
    ]
