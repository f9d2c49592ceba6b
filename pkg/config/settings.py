import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_validator, model_validator
from pydantic.fields import FieldInfo
from pydantic_settings import (
    BaseSettings,
    NoDecode,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from app.exceptions.CustomExceptions import ConfigError
from app.schemas.config_schema import (
    DistillationLoss,
    LossVariants,
    LossWeights,
    MissingMode,
    ModelConfig,
    SynthSpec,
    TagLoss,
    TrainConfig,
)
from app.schemas.data_schema import MODALITIES, Modality

logger = logging.getLogger(__name__)

ENV_PREFIX = "TATE_"


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "TATE missing-modality classifier"
    APP_ENV: str = "development"
    APP_DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    # Served network
    CHECKPOINT_PATH: str = "runs/student.json"

    # HTTP
    API_HOST: str = "127.0.0.1"
    API_PORT: int = 8000
    ALLOWED_ORIGINS: str = "http://localhost:3000,http://localhost:8000"

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    def get_allowed_origins(self) -> list[str]:
        """Parse ALLOWED_ORIGINS string into list"""
        return [origin.strip() for origin in self.ALLOWED_ORIGINS.split(",") if origin.strip()]


def _split_list(value: Any) -> Any:
    """Accept "a,b", a JSON list, or a list"""
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("["):
            return json.loads(text)
        return [item.strip() for item in text.split(",") if item.strip()]
    return value


class KeyValueFileSource(PydanticBaseSettingsSource):
    """Flat ``key=value`` run file; keys are field names in any case"""

    def __init__(self, settings_cls: type[BaseSettings], path: str | Path | None):
        super().__init__(settings_cls)
        self.path = Path(path) if path is not None else None
        self.values = self._read()

    def _read(self) -> dict[str, str]:
        if self.path is None:
            return {}
        if not self.path.is_file():
            raise ConfigError(f"config file not found: {self.path}")
        values: dict[str, str] = {}
        for key, value in dotenv_values(self.path).items():
            name = key.strip().lower()
            if name.startswith(ENV_PREFIX.lower()):
                name = name[len(ENV_PREFIX) :]
            if name not in self.settings_cls.model_fields or name == "config_file":
                raise ConfigError(f"unknown key '{key}' in config file {self.path}")
            if value is None:
                raise ConfigError(f"key '{key}' in config file {self.path} has no value")
            values[name] = value
        return values

    def get_field_value(self, field: FieldInfo, field_name: str) -> tuple[Any, str, bool]:
        return self.values.get(field_name), field_name, False

    def __call__(self) -> dict[str, Any]:
        return dict(self.values)


class RunConfig(BaseSettings):
    """Everything one command needs, validated before any compute.

    Precedence: defaults < config file < TATE_* environment < flags.
    """

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        case_sensitive=False,
        extra="forbid",
        allow_inf_nan=False,
    )

    config_file: Path | None = None

    # Paths
    data: Path | None = None
    out: Path | None = None
    checkpoint: Path | None = None
    teacher: Path | None = None
    history: Path | None = None
    holdout: float = Field(default=0.0, ge=0.0, lt=1.0)
    pretrain: bool = False

    # Network
    hidden: int = Field(default=300, ge=2)
    heads: int = Field(default=4, ge=1)
    dropout: float = Field(default=0.3, ge=0.0, lt=1.0)
    modalities: Annotated[list[Modality], NoDecode] = list(MODALITIES)
    use_tag: bool = True
    use_common_space: bool = True

    # Training
    lr: float = Field(default=0.001, gt=0.0)
    batch_size: int = Field(default=32, ge=1)
    epochs: int = Field(default=20, ge=0)
    eta: float = Field(default=0.0, ge=0.0, le=1.0)
    mode: MissingMode = "single"
    lambda1: float = Field(default=0.1, ge=0.0)
    lambda2: float = Field(default=0.1, ge=0.0)
    lambda3: float = Field(default=0.1, ge=0.0)
    forward_loss: DistillationLoss = "js"
    backward_loss: DistillationLoss = "js"
    tag_loss: TagLoss = "mae"
    seed: int = 0

    # Evaluation and export
    etas: Annotated[list[float], NoDecode] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    eval_mode: Literal["single", "multiple", "both"] = "single"
    representation: Literal["e_out", "e_all"] = "e_out"

    # Gradient check
    samples: int = Field(default=2, ge=1)
    max_coords: int = Field(default=16, ge=0)
    fd_eps: float = Field(default=1e-5, gt=0.0)
    tolerance: float = Field(default=1e-4, gt=0.0)
    gradcheck_dropout: float = Field(default=0.0, ge=0.0, lt=1.0)

    # Synthetic data
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

    # Serving
    host: str | None = None
    port: int | None = Field(default=None, ge=1, le=65535)

    @field_validator("modalities", "etas", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("etas")
    @classmethod
    def check_etas(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("at least one missing rate is required")
        if any(not 0.0 <= eta <= 1.0 for eta in value):
            raise ValueError(f"missing rates must lie in [0, 1], got {value}")
        return value

    @model_validator(mode="after")
    def check_network(self) -> "RunConfig":
        try:
            self.to_model_config(self.classes, (1, 1, 1))
        except ValidationError as exc:
            raise ValueError(exc.errors()[0]["msg"]) from None
        return self

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        path = getattr(init_settings, "init_kwargs", {}).get("config_file")
        return init_settings, env_settings, KeyValueFileSource(settings_cls, path)

    def to_model_config(self, class_count: int, widths: tuple[int, int, int]) -> ModelConfig:
        visual_dim, acoustic_dim, textual_dim = widths
        return ModelConfig(
            hidden=self.hidden,
            heads=self.heads,
            class_count=class_count,
            dropout=self.dropout,
            visual_dim=visual_dim,
            acoustic_dim=acoustic_dim,
            textual_dim=textual_dim,
            modalities=tuple(self.modalities),
            use_tag=self.use_tag,
            use_common_space=self.use_common_space,
        )

    def to_train_config(self) -> TrainConfig:
        return TrainConfig(
            lr=self.lr,
            batch_size=self.batch_size,
            epochs=self.epochs,
            eta=self.eta,
            mode=self.mode,
            weights=LossWeights(lambda1=self.lambda1, lambda2=self.lambda2, lambda3=self.lambda3),
            variants=LossVariants(
                forward=self.forward_loss, backward=self.backward_loss, tag=self.tag_loss
            ),
            seed=self.seed,
        )

    def to_synth_spec(self) -> SynthSpec:
        return SynthSpec(
            classes=self.classes,
            per_class=self.per_class,
            visual_dim=self.visual_dim,
            acoustic_dim=self.acoustic_dim,
            textual_dim=self.textual_dim,
            visual_len=self.visual_len,
            acoustic_len=self.acoustic_len,
            textual_len=self.textual_len,
            separation=self.separation,
            noise=self.noise,
            seed=self.seed,
        )

    def eval_modes(self) -> list[MissingMode]:
        return ["single", "multiple"] if self.eval_mode == "both" else [self.eval_mode]

    def log_effective(self, command: str) -> None:
        effective = json.dumps(self.model_dump(mode="json", exclude={"config_file"}), sort_keys=True)
        logger.info(f"{command} effective config: {effective}")


settings = Settings()
