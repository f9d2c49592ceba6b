import os

import pytest
from pydantic import ValidationError

from app.exceptions.CustomExceptions import ConfigError
from app.schemas.data_schema import Modality
from config.settings import RunConfig, Settings


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in list(os.environ):
        if name.upper().startswith("TATE_"):
            monkeypatch.delenv(name)


def test_defaults():
    config = RunConfig()
    assert config.hidden == 300
    assert config.heads == 4
    assert config.lr == 0.001
    assert config.etas == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]
    assert config.modalities == [Modality.VISUAL, Modality.ACOUSTIC, Modality.TEXTUAL]


def test_precedence_file_env_flags(tmp_path, monkeypatch):
    path = tmp_path / "run.cfg"
    path.write_text("lr=0.01\nepochs=5\nhidden=16\nheads=2\n")
    monkeypatch.setenv("TATE_EPOCHS", "7")
    monkeypatch.setenv("TATE_HEADS", "4")
    config = RunConfig(config_file=path, hidden=32)
    assert config.lr == 0.01
    assert config.epochs == 7
    assert config.heads == 4
    assert config.hidden == 32


def test_file_accepts_prefixed_keys_in_any_case(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("TATE_BATCH_SIZE=4\nMode=multiple\n")
    config = RunConfig(config_file=path)
    assert config.batch_size == 4
    assert config.mode == "multiple"


def test_unknown_file_key_is_rejected(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("learning_rate=0.1\n")
    with pytest.raises(ConfigError) as info:
        RunConfig(config_file=path)
    assert "learning_rate" in info.value.detail
    assert info.value.exit_code == 2


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(config_file=tmp_path / "absent.cfg")


def test_list_values(tmp_path, monkeypatch):
    monkeypatch.setenv("TATE_ETAS", "[0.0, 0.5]")
    path = tmp_path / "run.cfg"
    path.write_text("modalities=textual,visual\n")
    config = RunConfig(config_file=path)
    assert config.etas == [0.0, 0.5]
    assert config.modalities == [Modality.TEXTUAL, Modality.VISUAL]
    assert config.to_model_config(3, (1, 1, 1)).modalities == (Modality.VISUAL, Modality.TEXTUAL)


@pytest.mark.parametrize(
    "overrides",
    [
        {"etas": "0.1,1.5"},
        {"hidden": 10, "heads": 4},
        {"dropout": 1.0},
        {"eta": -0.1},
        {"mode": "partial"},
        {"lr": float("nan")},
        {"unknown": 1},
    ],
)
def test_invalid_values(overrides):
    with pytest.raises(ValidationError):
        RunConfig(**overrides)


def test_conversions():
    config = RunConfig(lambda1=0.0, forward_loss="mae", eval_mode="both", seed=9)
    train = config.to_train_config()
    assert train.weights.lambda1 == 0.0
    assert train.variants.forward == "mae"
    assert train.seed == 9
    assert config.eval_modes() == ["single", "multiple"]
    assert config.to_synth_spec().seed == 9


def test_effective_config_is_logged(caplog):
    with caplog.at_level("INFO"):
        RunConfig(hidden=16, heads=2).log_effective("train")
    assert '"hidden": 16' in caplog.text


def test_app_settings_origins(monkeypatch):
    monkeypatch.setenv("TATE_ALLOWED_ORIGINS", "http://a, http://b,")
    assert Settings(_env_file=None).get_allowed_origins() == ["http://a", "http://b"]
