from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.schemas.data_schema import MODALITIES, Modality

TAG_WIDTH = 4

MissingMode = Literal["single", "multiple"]
DistillationLoss = Literal["js", "mae", "cosine"]
TagLoss = Literal["mae", "js", "cosine"]


class ModelConfig(BaseModel):
    """Network shape; defaults match full-size extracted features"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    hidden: int = Field(default=300, ge=2)
    heads: int = Field(default=4, ge=1)
    class_count: int = Field(default=3, ge=2)
    dropout: float = Field(default=0.3, ge=0.0, lt=1.0)
    visual_dim: int = Field(default=709, ge=1)
    acoustic_dim: int = Field(default=33, ge=1)
    textual_dim: int = Field(default=768, ge=1)
    modalities: tuple[Modality, ...] = MODALITIES
    use_tag: bool = True
    use_common_space: bool = True

    @field_validator("modalities")
    @classmethod
    def canonical_modalities(cls, value: tuple[Modality, ...]) -> tuple[Modality, ...]:
        if not value:
            raise ValueError("at least one modality must be enabled")
        return tuple(m for m in MODALITIES if m in set(value))

    @model_validator(mode="after")
    def check_dimensions(self) -> "ModelConfig":
        if self.hidden % 2:
            raise ValueError(f"hidden size {self.hidden} must be even (common width is hidden/2)")
        if self.hidden % self.heads:
            raise ValueError(f"hidden size {self.hidden} is not divisible by {self.heads} heads")
        return self

    @property
    def common_width(self) -> int:
        return self.hidden // 2

    @property
    def joint_width(self) -> int:
        return 3 * self.hidden + (TAG_WIDTH if self.use_tag else 0)

    def input_dim(self, modality: Modality) -> int:
        return getattr(self, f"{modality.value}_dim")

    @property
    def disabled(self) -> tuple[Modality, ...]:
        return tuple(m for m in MODALITIES if m not in self.modalities)


class LossWeights(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    lambda1: float = Field(default=0.1, ge=0.0)
    lambda2: float = Field(default=0.1, ge=0.0)
    lambda3: float = Field(default=0.1, ge=0.0)


class LossVariants(BaseModel):
    """Loss used for each auxiliary term"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    forward: DistillationLoss = "js"
    backward: DistillationLoss = "js"
    tag: TagLoss = "mae"


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    lr: float = Field(default=0.001, gt=0.0)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=20, ge=0)
    eta: float = Field(default=0.0, ge=0.0, le=1.0)
    mode: MissingMode = "single"
    weights: LossWeights = LossWeights()
    variants: LossVariants = LossVariants()
    seed: int = 0
    beta1: float = Field(default=0.9, ge=0.0, lt=1.0)
    beta2: float = Field(default=0.999, ge=0.0, lt=1.0)
    adam_eps: float = Field(default=1e-8, gt=0.0)


class SynthSpec(BaseModel):
    """Parameters of the synthetic multimodal generator"""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    classes: int = Field(default=3, ge=2)
    per_class: int = Field(default=100, ge=1)
    visual_dim: int = Field(default=20, ge=1)
    acoustic_dim: int = Field(default=12, ge=1)
    textual_dim: int = Field(default=32, ge=1)
    visual_len: int = Field(default=10, ge=1, le=100)
    acoustic_len: int = Field(default=15, ge=1, le=150)
    textual_len: int = Field(default=8, ge=1, le=25)
    separation: float = Field(default=5.0, ge=0.0)
    noise: float = Field(default=1.0, ge=0.0)
    latent_dim: int = Field(default=8, ge=1)
    seed: int = 0

    def dim(self, modality: Modality) -> int:
        return getattr(self, f"{modality.value}_dim")

    def max_len(self, modality: Modality) -> int:
        return getattr(self, f"{modality.value}_len")
