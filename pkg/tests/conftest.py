import numpy as np
import pytest

from app.data.synthetic import synth_generate
from app.schemas.config_schema import ModelConfig, SynthSpec, TrainConfig
from app.schemas.data_schema import Dataset


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_spec() -> SynthSpec:
    return SynthSpec(
        classes=3,
        per_class=6,
        visual_dim=5,
        acoustic_dim=4,
        textual_dim=6,
        visual_len=4,
        acoustic_len=5,
        textual_len=3,
        seed=7,
    )


@pytest.fixture
def small_dataset(small_spec: SynthSpec) -> Dataset:
    return synth_generate(small_spec)


@pytest.fixture
def small_config(small_spec: SynthSpec) -> ModelConfig:
    return ModelConfig(
        hidden=8,
        heads=2,
        class_count=3,
        dropout=0.0,
        visual_dim=small_spec.visual_dim,
        acoustic_dim=small_spec.acoustic_dim,
        textual_dim=small_spec.textual_dim,
    )


@pytest.fixture
def quick_train() -> TrainConfig:
    return TrainConfig(lr=0.01, batch_size=8, epochs=2, seed=3)
