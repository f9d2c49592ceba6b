import logging
from typing import Literal, NamedTuple

import numpy as np

from app.exceptions.CustomExceptions import EmptyDatasetError
from app.models.TateModel import TateModel
from app.schemas.config_schema import MissingMode
from app.schemas.data_schema import Dataset
from app.services.EvaluationService import EVAL_BATCH, EvaluationService

logger = logging.getLogger(__name__)

Representation = Literal["e_out", "e_all"]


class Embeddings(NamedTuple):
    ids: list[str]
    labels: list[int]
    patterns: list[str]
    vectors: np.ndarray


class EmbeddingService:
    def __init__(self, model: TateModel, batch_size: int = EVAL_BATCH):
        self.model = model
        self.batch_size = batch_size

    def export(
        self,
        dataset: Dataset,
        representation: Representation = "e_out",
        eta: float = 0.0,
        mode: MissingMode = "single",
        seed: int = 0,
    ) -> Embeddings:
        """Joint representations of every segment under seeded masking"""
        if len(dataset) == 0:
            raise EmptyDatasetError("nothing to export from an empty dataset")
        self.model.check_widths(*dataset.widths)
        segments = EvaluationService(self.model).masked_segments(dataset, eta, mode, seed)
        chunks = []
        for i in range(0, len(segments), self.batch_size):
            outputs = self.model.forward(segments[i : i + self.batch_size], training=False)
            chunks.append(getattr(outputs, representation).value)
        vectors = np.concatenate(chunks, axis=0)
        logger.info(f"exported {representation} of {len(segments)} segments, width {vectors.shape[1]}")
        return Embeddings(
            ids=[s.id for s in segments],
            labels=[s.label for s in segments],
            patterns=[s.missing.label() for s in segments],
            vectors=vectors,
        )
