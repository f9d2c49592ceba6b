import logging
from collections import defaultdict
from typing import NamedTuple

import numpy as np

from app.autograd.engine import backward
from app.data.masking import assign_patterns, mask_missing
from app.exceptions.CustomExceptions import (
    ConfigError,
    ContractError,
    EmptyDatasetError,
    MissingTeacherError,
)
from app.losses.objective import TateObjective, cls_loss
from app.models.TateModel import TateModel
from app.models.TeacherModel import TeacherModel
from app.optim.adam import Adam
from app.schemas.config_schema import ModelConfig, TrainConfig
from app.schemas.data_schema import Dataset, Segment
from app.schemas.metrics_schema import History, HistoryRow

logger = logging.getLogger(__name__)

TEACHER_STREAM = 1
STUDENT_STREAM = 2
# Teacher representations are computed in chunks of this many segments
REPRESENT_CHUNK = 256


class RunStreams(NamedTuple):
    init: np.random.Generator
    patterns: np.random.Generator
    shuffle: np.random.Generator
    dropout: np.random.Generator


def run_streams(seed: int, purpose: int) -> RunStreams:
    """Independent generators for one run, all derived from ``seed``"""
    children = np.random.SeedSequence([seed, purpose]).spawn(4)
    return RunStreams(*(np.random.default_rng(c) for c in children))


def pattern_seed(streams: RunStreams) -> int:
    return int(streams.patterns.integers(2**63 - 1))


def batches(order: np.ndarray, size: int) -> list[np.ndarray]:
    return [order[i : i + size] for i in range(0, len(order), size)]


class TrainingService:
    def __init__(self, model_config: ModelConfig, train_config: TrainConfig):
        self.model_config = model_config
        self.train_config = train_config

    def _check_dataset(self, dataset: Dataset) -> None:
        if len(dataset) == 0:
            raise EmptyDatasetError("cannot train on an empty dataset")
        mc = self.model_config
        if dataset.class_count != mc.class_count:
            raise ConfigError(
                f"dataset has {dataset.class_count} classes, network expects {mc.class_count}"
            )
        if dataset.widths != (mc.visual_dim, mc.acoustic_dim, mc.textual_dim):
            raise ConfigError(
                f"dataset widths {dataset.widths} do not match network input widths "
                f"{(mc.visual_dim, mc.acoustic_dim, mc.textual_dim)}"
            )

    def _optimizer(self, params) -> Adam:
        tc = self.train_config
        return Adam(params, lr=tc.lr, beta1=tc.beta1, beta2=tc.beta2, eps=tc.adam_eps)

    def pretrain_teacher(self, dataset: Dataset) -> tuple[TeacherModel, History]:
        """Cross-entropy training of the full-modality network"""
        self._check_dataset(dataset)
        incomplete = [s.id for s in dataset.segments if not s.missing.is_complete]
        if incomplete:
            raise ContractError(f"teacher pre-training needs complete segments, {len(incomplete)} are not")
        tc = self.train_config
        streams = run_streams(tc.seed, TEACHER_STREAM)
        teacher = TeacherModel(self.model_config, streams.init)
        optimizer = self._optimizer(teacher.named_parameters())
        labels = dataset.labels
        history = History(columns=["cls"])

        for epoch in range(1, tc.epochs + 1):
            loss_sum, correct = 0.0, 0
            for idx in batches(streams.shuffle.permutation(len(dataset)), tc.batch_size):
                _, probs = teacher.forward([dataset[int(i)] for i in idx])
                loss = cls_loss(probs, labels[idx])
                optimizer.zero_grad()
                backward(loss)
                optimizer.step()
                loss_sum += loss.item() * len(idx)
                correct += int((probs.value.argmax(axis=1) == labels[idx]).sum())
            row = HistoryRow(
                epoch=epoch,
                terms={"cls": loss_sum / len(dataset)},
                total=loss_sum / len(dataset),
                train_acc=correct / len(dataset),
            )
            history.rows.append(row)
            logger.info(f"teacher epoch {epoch}/{tc.epochs}: cls={row.total:.4f} acc={row.train_acc:.4f}")

        teacher.trained = tc.epochs > 0
        if not teacher.trained:
            logger.warning("teacher returned untrained (zero epochs)")
        teacher.freeze()
        return teacher, history

    def teacher_representations(self, teacher: TeacherModel, segments: list[Segment]) -> np.ndarray:
        teacher.freeze()
        chunks = [
            teacher.represent(segments[i : i + REPRESENT_CHUNK]).value
            for i in range(0, len(segments), REPRESENT_CHUNK)
        ]
        return np.concatenate(chunks, axis=0)

    def train(self, dataset: Dataset, teacher: TeacherModel | None) -> tuple[TateModel, History]:
        """Two-branch training: masked student branch guided by the frozen teacher"""
        self._check_dataset(dataset)
        mc, tc = self.model_config, self.train_config
        objective = TateObjective(tc.weights, tc.variants, use_tag=mc.use_tag)
        active = objective.active_terms()
        if "forward" in active:
            if teacher is None:
                raise MissingTeacherError(None)
            if teacher.width != mc.joint_width:
                raise ConfigError(
                    f"teacher representation width {teacher.width} != student joint width {mc.joint_width}"
                )

        streams = run_streams(tc.seed, STUDENT_STREAM)
        model = TateModel(mc, streams.init)
        optimizer = self._optimizer(model.named_parameters())
        labels = dataset.labels

        patterns = assign_patterns(dataset, tc.eta, tc.mode, pattern_seed(streams), mc.modalities)
        masked = [mask_missing(s, p) for s, p in zip(dataset.segments, patterns)]
        e_pre = (
            self.teacher_representations(teacher, list(dataset.segments))
            if "forward" in active and teacher is not None
            else None
        )

        history = History(columns=list(active))
        logger.info(
            f"training {model} on {len(dataset)} segments: terms={active} eta={tc.eta} mode={tc.mode}"
        )
        for epoch in range(1, tc.epochs + 1):
            sums: dict[str, float] = defaultdict(float)
            correct = 0
            for idx in batches(streams.shuffle.permutation(len(dataset)), tc.batch_size):
                outputs = model.forward([masked[int(i)] for i in idx], training=True, rng=streams.dropout)
                breakdown = objective(outputs, None if e_pre is None else e_pre[idx], labels[idx])
                optimizer.zero_grad()
                backward(breakdown.total)
                optimizer.step()
                for name, value in breakdown.values().items():
                    sums[name] += value * len(idx)
                sums["total"] += breakdown.total.item() * len(idx)
                correct += int((outputs.probs.value.argmax(axis=1) == labels[idx]).sum())
                logger.debug(f"epoch {epoch} batch loss {breakdown.total.item():.6f}")
            n = len(dataset)
            row = HistoryRow(
                epoch=epoch,
                terms={name: sums[name] / n for name in active},
                total=sums["total"] / n,
                train_acc=correct / n,
            )
            history.rows.append(row)
            summary = " ".join(f"{k}={v:.4f}" for k, v in row.terms.items())
            logger.info(f"epoch {epoch}/{tc.epochs}: {summary} total={row.total:.4f} acc={row.train_acc:.4f}")

        model.trained = tc.epochs > 0
        return model, history
