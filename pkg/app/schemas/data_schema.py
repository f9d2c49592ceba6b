from collections import Counter
from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class Modality(str, Enum):
    VISUAL = "visual"
    ACOUSTIC = "acoustic"
    TEXTUAL = "textual"


# Order fixes tag digit positions and concatenation order everywhere
MODALITIES: tuple[Modality, ...] = (Modality.VISUAL, Modality.ACOUSTIC, Modality.TEXTUAL)

# Maximum sequence lengths kept on ingestion
MAX_LENGTHS: dict[Modality, int] = {
    Modality.VISUAL: 100,
    Modality.ACOUSTIC: 150,
    Modality.TEXTUAL: 25,
}


class MissingPattern(BaseModel):
    """Which modalities of a sample are absent"""

    model_config = ConfigDict(frozen=True)

    missing: frozenset[Modality] = frozenset()

    @field_validator("missing")
    @classmethod
    def not_all_missing(cls, value: frozenset[Modality]) -> frozenset[Modality]:
        if len(value) >= len(MODALITIES):
            raise ValueError("a sample cannot miss every modality")
        return value

    @classmethod
    def of(cls, *modalities: Modality | str) -> "MissingPattern":
        return cls(missing=frozenset(Modality(m) for m in modalities))

    @property
    def is_complete(self) -> bool:
        return not self.missing

    def __contains__(self, modality: object) -> bool:
        return modality in self.missing

    def union(self, other: "MissingPattern") -> "MissingPattern":
        return MissingPattern(missing=self.missing | other.missing)

    def ordered(self) -> list[Modality]:
        return [m for m in MODALITIES if m in self.missing]

    def label(self) -> str:
        return "+".join(m.value for m in self.ordered()) or "none"


class Tag(BaseModel):
    model_config = ConfigDict(frozen=True)

    digits: tuple[int, int, int, int]

    @field_validator("digits")
    @classmethod
    def check_digits(cls, value: tuple[int, int, int, int]) -> tuple[int, int, int, int]:
        if any(d not in (0, 1) for d in value):
            raise ValueError("tag digits must be 0 or 1")
        flags = value[1:]
        if value[0] == 1 and any(flags):
            raise ValueError("a complete-sample tag cannot flag missing modalities")
        if value[0] == 0 and not any(flags):
            raise ValueError("an incomplete-sample tag must flag a missing modality")
        if all(flags):
            raise ValueError("a tag cannot flag every modality as missing")
        return value

    def as_string(self) -> str:
        return "".join(str(d) for d in self.digits)

    def as_array(self) -> np.ndarray:
        return np.array(self.digits, dtype=np.float64)


def _as_sequence(value: object) -> np.ndarray:
    array = np.array(value, dtype=np.float64, copy=True)
    if array.ndim != 2 or array.shape[0] == 0 or array.shape[1] == 0:
        raise ValueError(f"expected a non-empty [length × width] sequence, got shape {array.shape}")
    if not np.all(np.isfinite(array)):
        raise ValueError("features must be finite")
    array.flags.writeable = False
    return array


class Segment(BaseModel):
    """One sample: three feature sequences, its label and its missing pattern"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    label: int = Field(ge=0)
    visual: np.ndarray
    acoustic: np.ndarray
    textual: np.ndarray
    missing: MissingPattern = MissingPattern()

    @field_validator("visual", "acoustic", "textual", mode="before")
    @classmethod
    def coerce_sequence(cls, value: object) -> np.ndarray:
        if isinstance(value, np.ndarray) and value.dtype == np.float64 and not value.flags.writeable:
            if value.ndim == 2 and value.size > 0:
                return value
        return _as_sequence(value)

    def features(self, modality: Modality) -> np.ndarray:
        return getattr(self, modality.value)

    def width(self, modality: Modality) -> int:
        return int(self.features(modality).shape[1])


class SegmentRecord(BaseModel):
    """One JSONL line"""

    model_config = ConfigDict(extra="forbid")

    id: str
    label: int = Field(ge=0)
    visual: list[list[float]]
    acoustic: list[list[float]]
    textual: list[list[float]]

    @classmethod
    def from_segment(cls, segment: Segment) -> "SegmentRecord":
        return cls(
            id=segment.id,
            label=segment.label,
            visual=segment.visual.tolist(),
            acoustic=segment.acoustic.tolist(),
            textual=segment.textual.tolist(),
        )


class Dataset(BaseModel):
    """Immutable collection of segments with homogeneous feature widths"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    segments: tuple[Segment, ...] = ()
    class_count: int = Field(ge=2)
    visual_dim: int = 0
    acoustic_dim: int = 0
    textual_dim: int = 0

    @model_validator(mode="after")
    def check_homogeneous(self) -> "Dataset":
        seen: set[str] = set()
        for segment in self.segments:
            if segment.id in seen:
                raise ValueError(f"duplicate segment id '{segment.id}'")
            seen.add(segment.id)
            if segment.label >= self.class_count:
                raise ValueError(
                    f"segment '{segment.id}' has label {segment.label} >= class count {self.class_count}"
                )
            for modality in MODALITIES:
                if segment.width(modality) != self.dim(modality):
                    raise ValueError(
                        f"segment '{segment.id}' {modality.value} width {segment.width(modality)} "
                        f"!= dataset width {self.dim(modality)}"
                    )
        return self

    @classmethod
    def from_segments(cls, segments: list[Segment], class_count: int) -> "Dataset":
        if not segments:
            return cls(class_count=class_count)
        head = segments[0]
        return cls(
            segments=tuple(segments),
            class_count=class_count,
            visual_dim=head.width(Modality.VISUAL),
            acoustic_dim=head.width(Modality.ACOUSTIC),
            textual_dim=head.width(Modality.TEXTUAL),
        )

    def dim(self, modality: Modality) -> int:
        return getattr(self, f"{modality.value}_dim")

    @property
    def widths(self) -> tuple[int, int, int]:
        return (self.visual_dim, self.acoustic_dim, self.textual_dim)

    @property
    def labels(self) -> np.ndarray:
        return np.array([s.label for s in self.segments], dtype=np.int64)

    def subset(self, indices: list[int] | np.ndarray) -> "Dataset":
        return self.model_copy(update={"segments": tuple(self.segments[int(i)] for i in indices)})

    def class_counts(self) -> dict[int, int]:
        counts = Counter(s.label for s in self.segments)
        return {c: counts.get(c, 0) for c in range(self.class_count)}

    def __len__(self) -> int:
        return len(self.segments)

    def __getitem__(self, index: int) -> Segment:
        return self.segments[index]
