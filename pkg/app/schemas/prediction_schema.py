from typing import Literal

from pydantic import BaseModel, Field

from app.schemas.config_schema import ModelConfig
from app.schemas.data_schema import Modality


class PredictRequest(BaseModel):
    id: str = "request"
    visual: list[list[float]] = Field(..., min_length=1)
    acoustic: list[list[float]] = Field(..., min_length=1)
    textual: list[list[float]] = Field(..., min_length=1)
    missing: list[Modality] = Field(default_factory=list, max_length=2)


class PredictResponse(BaseModel):
    id: str
    tag: str
    missing: list[Modality]
    probabilities: list[float]
    predicted: int


class ModelInfo(BaseModel):
    kind: Literal["student", "teacher"]
    network: ModelConfig
    parameter_count: int
    trained: bool
