import logging
from collections.abc import Sequence

import numpy as np

from app.data.masking import assign_patterns, mask_missing
from app.exceptions.CustomExceptions import ConfigError, EmptyDatasetError
from app.models.TateModel import TateModel
from app.schemas.config_schema import MissingMode
from app.schemas.data_schema import Dataset, Segment
from app.schemas.metrics_schema import Metrics, SweepRow
from app.utils.metrics import compute_metrics

logger = logging.getLogger(__name__)

DEFAULT_ETAS = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5)
EVAL_BATCH = 128


class EvaluationService:
    def __init__(self, model: TateModel, batch_size: int = EVAL_BATCH):
        self.model = model
        self.batch_size = batch_size

    def masked_segments(self, dataset: Dataset, eta: float, mode: MissingMode, seed: int) -> list[Segment]:
        patterns = assign_patterns(dataset, eta, mode, seed, self.model.config.modalities)
        return [mask_missing(s, p) for s, p in zip(dataset.segments, patterns)]

    def predict(self, segments: Sequence[Segment]) -> np.ndarray:
        """Argmax class of every segment, inference mode"""
        predictions = [
            self.model.predict_proba(segments[i : i + self.batch_size]).argmax(axis=1)
            for i in range(0, len(segments), self.batch_size)
        ]
        return np.concatenate(predictions)

    def evaluate(self, dataset: Dataset, eta: float = 0.0, mode: MissingMode = "single", seed: int = 0) -> Metrics:
        """Mask with a seeded pattern per sample, classify, and score"""
        if len(dataset) == 0:
            raise EmptyDatasetError("cannot evaluate on an empty dataset")
        if dataset.class_count != self.model.config.class_count:
            raise ConfigError(
                f"dataset has {dataset.class_count} classes, network expects {self.model.config.class_count}"
            )
        self.model.check_widths(*dataset.widths)
        if not self.model.trained:
            logger.warning("evaluating an untrained network")
        predictions = self.predict(self.masked_segments(dataset, eta, mode, seed))
        metrics = compute_metrics(dataset.labels, predictions, dataset.class_count)
        logger.info(f"eval eta={eta} mode={mode}: acc={metrics.accuracy:.4f} m_f1={metrics.macro_f1:.4f}")
        return metrics

    def sweep(
        self,
        dataset: Dataset,
        etas: Sequence[float] = DEFAULT_ETAS,
        modes: Sequence[MissingMode] = ("single",),
        seed: int = 0,
    ) -> list[SweepRow]:
        rows = []
        for mode in modes:
            for eta in etas:
                metrics = self.evaluate(dataset, eta, mode, seed)
                rows.append(
                    SweepRow(eta=eta, mode=mode, m_f1=metrics.macro_f1, acc=metrics.accuracy, metrics=metrics)
                )
        return rows
