import binascii
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.exceptions.CustomExceptions import CheckpointError
from app.models.BaseModel import BaseModel
from app.models.TateModel import TateModel
from app.models.TeacherModel import TeacherModel
from app.repositories.BaseRepository import BaseRepository
from app.schemas.checkpoint_schema import CheckpointDocument, TensorRecord
from app.schemas.config_schema import TrainConfig

logger = logging.getLogger(__name__)


class CheckpointRepository(BaseRepository[CheckpointDocument]):
    def __init__(self, path: str | Path):
        super().__init__(CheckpointDocument, path)

    def _document(self, model: BaseModel, kind: str, train: TrainConfig | None) -> CheckpointDocument:
        return CheckpointDocument(
            kind=kind,
            network=model.config,
            train=train,
            trained=model.trained,
            parameters={name: TensorRecord.from_array(v) for name, v in model.to_dict().items()},
        )

    def save_student(self, model: TateModel, train: TrainConfig | None = None) -> Path:
        path = self.save(self._document(model, "student", train))
        logger.info(f"saved student checkpoint ({model.parameter_count()} parameters) to {path}")
        return path

    def save_teacher(self, teacher: TeacherModel, train: TrainConfig | None = None) -> Path:
        path = self.save(self._document(teacher, "teacher", train))
        logger.info(f"saved teacher checkpoint to {path}")
        return path

    def load(self) -> CheckpointDocument:
        if not self.exists():
            raise CheckpointError(f"checkpoint not found: {self.path}")
        try:
            return super().load()
        except ValidationError as exc:
            error = exc.errors()[0]
            where = ".".join(str(p) for p in error["loc"])
            raise CheckpointError(f"corrupt checkpoint {self.path}: {where} {error['msg']}".strip()) from None
        except UnicodeDecodeError:
            raise CheckpointError(f"corrupt checkpoint {self.path}: not UTF-8 text") from None

    def _restore(self, model: BaseModel, document: CheckpointDocument) -> None:
        try:
            values = {name: record.to_array() for name, record in document.parameters.items()}
        except (binascii.Error, ValueError) as exc:
            raise CheckpointError(f"corrupt tensor data in {self.path}: {exc}") from None
        model.load_dict(values)
        model.trained = document.trained

    def load_student(self) -> TateModel:
        document = self.load()
        if document.kind != "student":
            raise CheckpointError(f"{self.path} holds a {document.kind} network, expected a student")
        model = TateModel(document.network, np.random.default_rng(0))
        self._restore(model, document)
        return model

    def load_teacher(self) -> TeacherModel:
        document = self.load()
        if document.kind != "teacher":
            raise CheckpointError(f"{self.path} holds a {document.kind} network, expected a teacher")
        teacher = TeacherModel(document.network, np.random.default_rng(0))
        self._restore(teacher, document)
        teacher.freeze()
        return teacher
