import json
import logging
import os

import pytest

from app.routes.cli_routes import build_parser, run

SMALL_DATA = [
    "--classes", "3", "--per-class", "5",
    "--visual-dim", "4", "--acoustic-dim", "3", "--textual-dim", "5",
    "--visual-len", "3", "--acoustic-len", "3", "--textual-len", "2",
]  # fmt: skip
SMALL_NET = ["--hidden", "8", "--heads", "2", "--epochs", "1", "--batch-size", "8", "--dropout", "0"]


@pytest.fixture(autouse=True)
def isolated(monkeypatch):
    for name in list(os.environ):
        if name.upper().startswith("TATE_"):
            monkeypatch.delenv(name)
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def _run(capsys, *argv) -> tuple[int, dict]:
    code = run([str(a) for a in argv])
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1
    return code, json.loads(lines[0])


def _synth(capsys, path, *extra) -> dict:
    code, summary = _run(capsys, "synth", "--out", path, *SMALL_DATA, *extra)
    assert code == 0
    return summary


def test_synth_is_reproducible(tmp_path, capsys):
    first = tmp_path / "a.jsonl"
    summary = _synth(capsys, first, "--seed", "4")
    assert summary["status"] == "ok"
    assert summary["segments"] == 15
    assert summary["class_counts"] == {"0": 5, "1": 5, "2": 5}
    assert summary["widths"] == [4, 3, 5]
    assert len(first.read_text().splitlines()) == 15

    second = tmp_path / "b.jsonl"
    _synth(capsys, second, "--seed", "4")
    assert first.read_bytes() == second.read_bytes()


def test_synth_without_separation_warns(tmp_path, capsys):
    summary = _synth(capsys, tmp_path / "flat.jsonl", "--separation", "0")
    assert summary["warning"] == "no class signal"


def test_gradcheck(capsys):
    code, summary = _run(capsys, "gradcheck")
    assert code == 0
    assert summary["passed"] is True
    assert summary["worst"] < summary["tolerance"]


def test_gradcheck_reports_ignored_network_settings(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TATE_HIDDEN", "32")
    config = tmp_path / "run.cfg"
    config.write_text("heads=4\n")
    code = run(["gradcheck", "--config", str(config), "--samples", "1"])
    captured = capsys.readouterr()
    assert code == 0
    assert json.loads(captured.out)["passed"] is True
    assert "always runs the tiny network" in captured.err
    assert "ignoring configured heads, hidden" in captured.err


def test_gradcheck_is_quiet_without_network_settings(capsys):
    assert run(["gradcheck", "--samples", "1"]) == 0
    assert "tiny network" not in capsys.readouterr().err


def test_gradcheck_refuses_dropout(capsys):
    code, summary = _run(capsys, "gradcheck", "--dropout", "0.3")
    assert code == 2
    assert summary["status"] == "error"
    assert summary["error"] == "ConfigError"


def test_train_without_teacher(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    _synth(capsys, data)
    code, summary = _run(capsys, "train", "--data", data, "--out", tmp_path / "s.json", *SMALL_NET)
    assert code == 2
    assert summary["error"] == "MissingTeacherError"
    assert "tate pretrain" in summary["detail"]


def test_missing_data_file(tmp_path, capsys):
    code, _ = _run(capsys, "pretrain", "--data", tmp_path / "absent.jsonl", "--out", tmp_path / "t.json")
    assert code == 3


def test_binary_data_file(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    data.write_bytes(b"\x89PNG\r\n\x1a\n\xff\xd8")
    code, summary = _run(capsys, "pretrain", "--data", data, "--out", tmp_path / "t.json")
    assert code == 3
    assert summary["error"] == "SchemaError"
    assert "not UTF-8" in summary["detail"]


def test_missing_checkpoint(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    _synth(capsys, data)
    code, summary = _run(capsys, "eval", "--data", data, "--checkpoint", tmp_path / "absent.json")
    assert code == 4
    assert summary["error"] == "CheckpointError"


def test_invalid_flag_value_is_a_config_error(tmp_path, capsys):
    code, _ = _run(capsys, "synth", "--out", tmp_path / "x.jsonl", "--per-class", "0")
    assert code == 2


def test_unknown_config_key(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("epochz=3\n")
    code, summary = _run(capsys, "synth", "--config", config, "--out", tmp_path / "x.jsonl")
    assert code == 2
    assert "epochz" in summary["detail"]


def test_config_file_feeds_commands(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("per_class=2\nclasses=2\n")
    summary = _synth(capsys, tmp_path / "x.jsonl", "--config", config, "--classes", "4")
    assert summary["segments"] == 8


def test_pretrain_train_eval_export(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    teacher = tmp_path / "teacher.json"
    student = tmp_path / "student.json"
    _synth(capsys, data)

    code, summary = _run(capsys, "pretrain", "--data", data, "--out", teacher, *SMALL_NET)
    assert code == 0
    assert summary["epochs"] == 1
    assert teacher.is_file()

    code, summary = _run(
        capsys, "train", "--data", data, "--out", student, "--teacher", teacher,
        "--eta", "0.3", "--mode", "multiple", *SMALL_NET,
    )  # fmt: skip
    assert code == 0
    assert summary["terms"] == ["cls", "forward", "backward", "tag"]
    history = tmp_path / "student.history.csv"
    assert summary["history"] == str(history)
    assert history.read_text().splitlines()[0] == "epoch,cls,forward,backward,tag,total,train_acc"

    sweep = tmp_path / "sweep.csv"
    code, summary = _run(
        capsys, "eval", "--data", data, "--checkpoint", student, "--etas", "0,0.5", "--mode", "both", "--out", sweep
    )
    assert code == 0
    assert [(r["eta"], r["mode"]) for r in summary["rows"]] == [
        (0.0, "single"), (0.5, "single"), (0.0, "multiple"), (0.5, "multiple"),
    ]  # fmt: skip
    assert len(sweep.read_text().splitlines()) == 5
    assert (tmp_path / "sweep.json").is_file()

    embeddings = tmp_path / "emb.csv"
    code, summary = _run(
        capsys, "export-embeddings", "--data", data, "--checkpoint", student,
        "--out", embeddings, "--representation", "e_all",
    )  # fmt: skip
    assert code == 0
    assert summary["rows"] == 15
    assert summary["width"] == 3 * 8 + 4
    assert len(embeddings.read_text().splitlines()) == 16


def test_inline_pretrain_without_forward_loss(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    _synth(capsys, data)
    code, summary = _run(
        capsys, "train", "--data", data, "--out", tmp_path / "s.json", "--lambda1", "0",
        "--holdout", "0.2", *SMALL_NET,
    )  # fmt: skip
    assert code == 0
    assert summary["terms"] == ["cls", "backward", "tag"]
    assert summary["eval_split"] == "holdout"

    teacher = tmp_path / "t.json"
    code, _ = _run(
        capsys, "train", "--data", data, "--out", tmp_path / "s2.json", "--pretrain", "--teacher", teacher, *SMALL_NET
    )
    assert code == 0
    assert teacher.is_file()


def test_logs_go_to_stderr(tmp_path, capsys):
    run(["--log-level", "INFO", "synth", "--out", str(tmp_path / "x.jsonl"), *SMALL_DATA])
    captured = capsys.readouterr()
    assert "effective config" in captured.err
    assert "effective config" not in captured.out


def test_every_command_is_registered():
    parser = build_parser()
    for command in ("synth", "pretrain", "train", "eval", "gradcheck", "export-embeddings", "serve"):
        assert parser.parse_args([command]).command == command


def test_identical_seeds_give_identical_files(tmp_path, capsys):
    data = tmp_path / "data.jsonl"
    _synth(capsys, data)
    outputs = []
    for run_dir in ("a", "b"):
        out = tmp_path / run_dir
        student = out / "student.json"
        assert _run(
            capsys, "train", "--data", data, "--out", student, "--pretrain", "--eta", "0.4",
            "--dropout", "0.2", *SMALL_NET[:-2], "--seed", "3",
        )[0] == 0  # fmt: skip
        assert _run(capsys, "eval", "--data", data, "--checkpoint", student, "--out", out / "sweep.csv")[0] == 0
        for _ in range(2):
            assert _run(
                capsys, "export-embeddings", "--data", data, "--checkpoint", student,
                "--out", out / "emb.csv", "--eta", "0.5",
            )[0] == 0  # fmt: skip
        outputs.append(
            [(out / name).read_bytes() for name in ("student.json", "student.history.csv", "sweep.csv", "emb.csv")]
        )
    assert outputs[0] == outputs[1]
