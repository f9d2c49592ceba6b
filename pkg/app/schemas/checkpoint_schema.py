import base64
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from app.schemas.config_schema import ModelConfig, TrainConfig

CHECKPOINT_FORMAT = "tate-checkpoint/1"


class TensorRecord(BaseModel):
    """A float64 tensor stored as base64 of its little-endian bytes"""

    model_config = ConfigDict(frozen=True)

    shape: list[int]
    dtype: Literal["<f8"] = "<f8"
    data: str

    @classmethod
    def from_array(cls, array: np.ndarray) -> "TensorRecord":
        raw = np.ascontiguousarray(array, dtype="<f8").tobytes()
        return cls(shape=list(array.shape), data=base64.b64encode(raw).decode("ascii"))

    def to_array(self) -> np.ndarray:
        raw = base64.b64decode(self.data.encode("ascii"), validate=True)
        array = np.frombuffer(raw, dtype=self.dtype).astype(np.float64)
        return array.reshape(self.shape)


class CheckpointDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    format: Literal["tate-checkpoint/1"] = CHECKPOINT_FORMAT
    kind: Literal["student", "teacher"]
    network: ModelConfig
    train: TrainConfig | None = None
    trained: bool
    parameters: dict[str, TensorRecord]
