"""
Command-line surface: ``tate <command> [flags]``.

Every flag maps onto a RunConfig field of the same name. Flags left out fall
back to the config file (--config), then TATE_* environment variables, then
defaults. One JSON summary line goes to stdout; logs go to stderr.
"""

import argparse
import json
import sys
from collections.abc import Callable, Sequence

from app.controllers.CliController import CliController, CommandResult
from app.exceptions.handlers import report_cli_error
from app.utils.logging_setup import configure_logging
from config.settings import RunConfig, settings

Command = Callable[[RunConfig], CommandResult]

COMMANDS: dict[str, Command] = {
    "synth": CliController.cmd_synth,
    "pretrain": CliController.cmd_pretrain,
    "train": CliController.cmd_train,
    "eval": CliController.cmd_eval,
    "gradcheck": CliController.cmd_gradcheck,
    "export-embeddings": CliController.cmd_export_embeddings,
    "serve": CliController.cmd_serve,
}


def _flag(parser: argparse._ActionsContainer, name: str, help: str, **kwargs) -> None:
    """Add ``--name`` with no default so absent flags do not override lower sources"""
    dest = kwargs.pop("dest", name.replace("-", "_"))
    parser.add_argument(f"--{name}", dest=dest, default=argparse.SUPPRESS, help=help, **kwargs)


def _add_seed(parser: argparse.ArgumentParser) -> None:
    _flag(parser, "seed", "seed of every random stream (default 0)", type=int)


def _add_network(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("network")
    _flag(group, "hidden", "modality representation width d (default 300)", type=int)
    _flag(group, "heads", "attention heads (default 4)", type=int)
    _flag(group, "dropout", "dropout rate (default 0.3)", type=float)
    _flag(group, "modalities", "enabled modalities, comma separated (default visual,acoustic,textual)")
    _flag(group, "use-tag", "feed the missing-pattern tag (default on)", action=argparse.BooleanOptionalAction)
    _flag(
        group,
        "use-common-space",
        "project modalities into the pairwise common space (default on)",
        action=argparse.BooleanOptionalAction,
    )


def _add_training(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training")
    _flag(group, "lr", "Adam learning rate (default 0.001)", type=float)
    _flag(group, "batch-size", "segments per batch (default 32)", type=int)
    _flag(group, "epochs", "training epochs (default 20)", type=int)
    _flag(group, "lambda1", "forward loss weight (default 0.1)", type=float)
    _flag(group, "lambda2", "backward loss weight (default 0.1)", type=float)
    _flag(group, "lambda3", "tag loss weight (default 0.1)", type=float)
    _flag(group, "forward-loss", "forward loss variant", choices=["js", "mae", "cosine"])
    _flag(group, "backward-loss", "backward loss variant", choices=["js", "mae", "cosine"])
    _flag(group, "tag-loss", "tag loss variant", choices=["mae", "js", "cosine"])


def _add_masking(parser: argparse.ArgumentParser) -> None:
    _flag(parser, "eta", "missing rate in [0, 1] (default 0)", type=float)
    _flag(parser, "mode", "missing mode (default single)", choices=["single", "multiple"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tate",
        description="Tag-assisted transformer encoder for classification under missing modalities",
    )
    parser.add_argument("--log-level", default=None, help=f"log level (default {settings.LOG_LEVEL})")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def command(name: str, help: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, help=help, description=help)
        _flag(sub, "config", "flat key=value config file", dest="config_file")
        return sub

    synth = command("synth", "generate a synthetic multimodal dataset as JSONL")
    _flag(synth, "out", "output JSONL path")
    _flag(synth, "classes", "number of classes (default 3)", type=int)
    _flag(synth, "per-class", "segments per class (default 100)", type=int)
    for modality, dim, length in (("visual", 20, 10), ("acoustic", 12, 15), ("textual", 32, 8)):
        _flag(synth, f"{modality}-dim", f"{modality} feature width (default {dim})", type=int)
        _flag(synth, f"{modality}-len", f"longest {modality} sequence (default {length})", type=int)
    _flag(synth, "separation", "distance of class anchors from the origin (default 5)", type=float)
    _flag(synth, "noise", "per-timestep noise scale (default 1)", type=float)
    _add_seed(synth)

    pretrain = command("pretrain", "train the full-modality teacher network")
    _flag(pretrain, "data", "training JSONL")
    _flag(pretrain, "out", "teacher checkpoint path")
    _add_network(pretrain)
    _add_training(pretrain)
    _add_seed(pretrain)

    train = command("train", "train the student network")
    _flag(train, "data", "training JSONL")
    _flag(train, "out", "student checkpoint path")
    _flag(train, "teacher", "teacher checkpoint (written here with --pretrain)")
    _flag(train, "pretrain", "pre-train the teacher inline", action="store_true")
    _flag(train, "history", "history CSV path (default <out>.history.csv)")
    _flag(train, "holdout", "fraction held out for the final metrics (default 0)", type=float)
    _add_network(train)
    _add_training(train)
    _add_masking(train)
    _add_seed(train)

    evaluate = command("eval", "score a checkpoint across missing rates")
    _flag(evaluate, "checkpoint", "student checkpoint")
    _flag(evaluate, "data", "evaluation JSONL")
    _flag(evaluate, "out", "metrics CSV path (JSON written alongside)")
    _flag(evaluate, "etas", "missing rates, comma separated (default 0,0.1,0.2,0.3,0.4,0.5)")
    _flag(evaluate, "mode", "missing mode (default single)", dest="eval_mode", choices=["single", "multiple", "both"])
    _add_seed(evaluate)

    gradcheck = command("gradcheck", "compare analytic and finite-difference gradients")
    _flag(gradcheck, "samples", "segments in the check (default 2)", type=int)
    _flag(gradcheck, "max-coords", "coordinates sampled per tensor, 0 for all (default 16)", type=int)
    _flag(gradcheck, "fd-eps", "finite-difference step (default 1e-5)", type=float)
    _flag(gradcheck, "tolerance", "max relative error (default 1e-4)", type=float)
    _flag(gradcheck, "dropout", "dropout rate; must be 0", dest="gradcheck_dropout", type=float)
    _flag(gradcheck, "modalities", "enabled modalities, comma separated")
    _flag(gradcheck, "use-tag", "feed the tag", action=argparse.BooleanOptionalAction)
    _flag(gradcheck, "use-common-space", "use the common space", action=argparse.BooleanOptionalAction)
    for name in ("lambda1", "lambda2", "lambda3"):
        _flag(gradcheck, name, f"{name} weight (default 0.1)", type=float)
    _flag(gradcheck, "forward-loss", "forward loss variant", choices=["js", "mae", "cosine"])
    _flag(gradcheck, "backward-loss", "backward loss variant", choices=["js", "mae", "cosine"])
    _flag(gradcheck, "tag-loss", "tag loss variant", choices=["mae", "js", "cosine"])
    _add_seed(gradcheck)

    export = command("export-embeddings", "write joint representations as CSV")
    _flag(export, "checkpoint", "student checkpoint")
    _flag(export, "data", "JSONL to embed")
    _flag(export, "out", "output CSV path")
    _flag(export, "representation", "encoder output or joint input (default e_out)", choices=["e_out", "e_all"])
    _add_masking(export)
    _add_seed(export)

    serve = command("serve", "serve a student checkpoint over HTTP")
    _flag(serve, "checkpoint", "student checkpoint (default TATE_CHECKPOINT_PATH)")
    _flag(serve, "host", f"bind address (default {settings.API_HOST})")
    _flag(serve, "port", f"port (default {settings.API_PORT})", type=int)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    configure_logging(args.pop("log_level") or settings.LOG_LEVEL, settings.LOG_FORMAT)
    try:
        config = RunConfig(**args)
        config.log_effective(command)
        result = COMMANDS[command](config)
    except Exception as exc:
        return report_cli_error(command, exc)
    status = "ok" if result.exit_code == 0 else "failed"
    sys.stdout.write(json.dumps({"command": command, "status": status, **result.summary}, sort_keys=True) + "\n")
    sys.stdout.flush()
    return result.exit_code


def main() -> None:
    sys.exit(run())
