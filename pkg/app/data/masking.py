import logging

import numpy as np

from app.data.tags import valid_patterns
from app.schemas.config_schema import MissingMode
from app.schemas.data_schema import MODALITIES, Dataset, MissingPattern, Modality, Segment

logger = logging.getLogger(__name__)


def mask_missing(segment: Segment, pattern: MissingPattern) -> Segment:
    """Zero every missing modality; present ones keep the very same arrays"""
    if pattern.is_complete:
        return segment
    update: dict[str, object] = {"missing": segment.missing.union(pattern)}
    for modality in pattern.ordered():
        zeros = np.zeros_like(segment.features(modality))
        zeros.flags.writeable = False
        update[modality.value] = zeros
    return segment.model_copy(update=update)


def _candidates(mode: MissingMode, among: tuple[Modality, ...]) -> list[MissingPattern]:
    non_empty = [p for p in valid_patterns(among) if not p.is_complete]
    if mode == "single":
        return [p for p in non_empty if len(p.missing) == 1]
    return non_empty


def sample_missing_pattern(
    rng: np.random.Generator,
    eta: float,
    mode: MissingMode = "single",
    among: tuple[Modality, ...] = MODALITIES,
) -> MissingPattern:
    """Incomplete with probability eta, then a uniform pick among the mode's patterns"""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"missing rate must lie in [0, 1], got {eta}")
    if rng.random() >= eta:
        return MissingPattern()
    candidates = _candidates(mode, among)
    if not candidates:
        return MissingPattern()
    return candidates[int(rng.integers(len(candidates)))]


def assign_patterns(
    dataset: Dataset,
    eta: float,
    mode: MissingMode,
    seed: int,
    enabled: tuple[Modality, ...] = MODALITIES,
) -> list[MissingPattern]:
    """One pattern per sample for a whole run; disabled modalities are always missing"""
    rng = np.random.default_rng(seed)
    forced = MissingPattern(missing=frozenset(m for m in MODALITIES if m not in enabled))
    patterns = [
        sample_missing_pattern(rng, eta, mode, among=enabled).union(forced)
        for _ in range(len(dataset))
    ]
    incomplete = sum(not p.is_complete for p in patterns)
    logger.debug(f"assigned patterns: {incomplete}/{len(patterns)} incomplete (eta={eta}, {mode})")
    return patterns
