import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from app.data.splits import split_dataset
from app.data.synthetic import synth_generate
from app.exceptions.CustomExceptions import ConfigError, MissingTeacherError
from app.models.TeacherModel import TeacherModel
from app.repositories.CheckpointRepository import CheckpointRepository
from app.repositories.DatasetRepository import DatasetRepository
from app.repositories.ReportRepository import ReportRepository
from app.schemas.config_schema import ModelConfig
from app.schemas.data_schema import Dataset
from app.services.EmbeddingService import EmbeddingService
from app.services.EvaluationService import EvaluationService
from app.services.GradCheckService import TINY_CONFIG, GradCheckService
from app.services.TrainingService import TrainingService
from config.settings import RunConfig, settings

logger = logging.getLogger(__name__)

# Network settings gradcheck replaces with the tiny shape
TINY_SHAPE_FIELDS = frozenset({"hidden", "heads", "dropout"})


@dataclass
class CommandResult:
    summary: dict[str, Any] = field(default_factory=dict)
    exit_code: int = 0


def _require(path: Path | None, flag: str) -> Path:
    if path is None:
        raise ConfigError(f"{flag} is required")
    return path


def _load_dataset(config: RunConfig, class_count: int | None = None) -> Dataset:
    return DatasetRepository(_require(config.data, "--data")).load_jsonl(class_count)


def _history_path(config: RunConfig, checkpoint: Path) -> Path:
    return config.history or checkpoint.with_name(f"{checkpoint.stem}.history.csv")


class CliController:
    @staticmethod
    def cmd_synth(config: RunConfig) -> CommandResult:
        """Generate a synthetic dataset and write it as JSONL"""
        out = _require(config.out, "--out")
        dataset = synth_generate(config.to_synth_spec())
        DatasetRepository(out).save_jsonl(dataset)
        summary: dict[str, Any] = {
            "out": str(out),
            "segments": len(dataset),
            "class_counts": {str(k): v for k, v in dataset.class_counts().items()},
            "widths": list(dataset.widths),
        }
        if config.separation == 0:
            summary["warning"] = "no class signal"
        return CommandResult(summary)

    @staticmethod
    def _pretrain(config: RunConfig, dataset: Dataset) -> tuple[TeacherModel, dict[str, Any]]:
        network = config.to_model_config(dataset.class_count, dataset.widths)
        teacher, history = TrainingService(network, config.to_train_config()).pretrain_teacher(dataset)
        final = history.rows[-1] if history.rows else None
        return teacher, {
            "epochs": len(history.rows),
            "trained": teacher.trained,
            "train_acc": final.train_acc if final else None,
            "cls": final.total if final else None,
        }

    @staticmethod
    def cmd_pretrain(config: RunConfig) -> CommandResult:
        """Train the full-modality network that guides the student"""
        out = _require(config.out, "--out")
        dataset = _load_dataset(config)
        teacher, summary = CliController._pretrain(config, dataset)
        CheckpointRepository(out).save_teacher(teacher, config.to_train_config())
        return CommandResult({"checkpoint": str(out), "parameters": teacher.parameter_count(), **summary})

    @staticmethod
    def _teacher_for(config: RunConfig, dataset: Dataset) -> TeacherModel | None:
        if config.pretrain:
            teacher, _ = CliController._pretrain(config, dataset)
            if config.teacher is not None:
                CheckpointRepository(config.teacher).save_teacher(teacher, config.to_train_config())
            return teacher
        if config.teacher is None or not config.teacher.is_file():
            raise MissingTeacherError(str(config.teacher) if config.teacher else None)
        return CheckpointRepository(config.teacher).load_teacher()

    @staticmethod
    def cmd_train(config: RunConfig) -> CommandResult:
        """Train the student; writes its checkpoint and the per-epoch history"""
        out = _require(config.out, "--out")
        dataset = _load_dataset(config)
        train_set, test_set = dataset, None
        if config.holdout > 0:
            train_set, test_set = split_dataset(dataset, config.holdout, config.seed)
            logger.info(f"held out {len(test_set)} of {len(dataset)} segments")

        network: ModelConfig = config.to_model_config(dataset.class_count, dataset.widths)
        train_config = config.to_train_config()
        needs_teacher = train_config.weights.lambda1 > 0
        teacher = CliController._teacher_for(config, train_set) if needs_teacher else None

        model, history = TrainingService(network, train_config).train(train_set, teacher)
        CheckpointRepository(out).save_student(model, train_config)
        history_path = ReportRepository(_history_path(config, out)).save_history(history)

        scored = test_set if test_set is not None and len(test_set) else train_set
        metrics = EvaluationService(model).evaluate(scored, config.eta, config.mode, config.seed)
        final = history.rows[-1] if history.rows else None
        return CommandResult(
            {
                "checkpoint": str(out),
                "history": str(history_path),
                "epochs": len(history.rows),
                "terms": history.columns,
                "final_loss": final.total if final else None,
                "train_acc": final.train_acc if final else None,
                "eval_split": "holdout" if scored is test_set else "train",
                "accuracy": metrics.accuracy,
                "macro_f1": metrics.macro_f1,
            }
        )

    @staticmethod
    def cmd_eval(config: RunConfig) -> CommandResult:
        """Missing-rate sweep of a student checkpoint"""
        model = CheckpointRepository(_require(config.checkpoint, "--checkpoint")).load_student()
        dataset = _load_dataset(config, model.config.class_count)
        rows = EvaluationService(model).sweep(dataset, config.etas, config.eval_modes(), config.seed)
        summary: dict[str, Any] = {
            "rows": [{"eta": r.eta, "mode": r.mode, "m_f1": r.m_f1, "acc": r.acc} for r in rows]
        }
        if config.out is not None:
            csv_path, json_path = ReportRepository(config.out).save_sweep(rows)
            summary.update(csv=str(csv_path), json=str(json_path))
        return CommandResult(summary)

    @staticmethod
    def cmd_gradcheck(config: RunConfig) -> CommandResult:
        """Finite-difference check of every parameter group on a tiny network"""
        ignored = sorted(TINY_SHAPE_FIELDS & config.model_fields_set)
        if ignored:
            logger.warning(
                f"gradcheck always runs the tiny network (hidden {TINY_CONFIG.hidden}, heads {TINY_CONFIG.heads}, "
                f"dropout {config.gradcheck_dropout}); ignoring configured {', '.join(ignored)}"
            )
        network = ModelConfig(
            **{
                **TINY_CONFIG.model_dump(),
                "dropout": config.gradcheck_dropout,
                "modalities": tuple(config.modalities),
                "use_tag": config.use_tag,
                "use_common_space": config.use_common_space,
            }
        )
        train_config = config.to_train_config()
        report = GradCheckService(
            network,
            weights=train_config.weights,
            variants=train_config.variants,
            samples=config.samples,
            max_coords=config.max_coords or None,
            eps=config.fd_eps,
            tolerance=config.tolerance,
            seed=config.seed,
        ).run()
        summary = {
            "groups": report.groups,
            "worst": report.worst,
            "tolerance": report.tolerance,
            "passed": report.passed,
        }
        return CommandResult(summary, exit_code=0 if report.passed else 5)

    @staticmethod
    def cmd_export_embeddings(config: RunConfig) -> CommandResult:
        """Write the joint representation of every segment as CSV"""
        out = _require(config.out, "--out")
        model = CheckpointRepository(_require(config.checkpoint, "--checkpoint")).load_student()
        dataset = _load_dataset(config, model.config.class_count)
        embeddings = EmbeddingService(model).export(
            dataset, config.representation, config.eta, config.mode, config.seed
        )
        ReportRepository(out).save_embeddings(*embeddings)
        return CommandResult(
            {
                "out": str(out),
                "rows": len(embeddings.ids),
                "representation": config.representation,
                "width": int(embeddings.vectors.shape[1]),
            }
        )

    @staticmethod
    def cmd_serve(config: RunConfig) -> CommandResult:
        """Run the HTTP inference app until interrupted"""
        import uvicorn

        if config.checkpoint is not None:
            settings.CHECKPOINT_PATH = str(config.checkpoint)
        # Fail before binding the port if the checkpoint is unusable
        CheckpointRepository(settings.CHECKPOINT_PATH).load_student()
        host = config.host or settings.API_HOST
        port = config.port or settings.API_PORT
        logger.info(f"serving {settings.CHECKPOINT_PATH} on http://{host}:{port}")
        uvicorn.run("main:app", host=host, port=port, log_level=settings.LOG_LEVEL.lower())
        return CommandResult({"checkpoint": settings.CHECKPOINT_PATH, "host": host, "port": port})
