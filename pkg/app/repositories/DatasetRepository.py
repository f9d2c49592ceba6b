import json
import logging
from pathlib import Path

from pydantic import ValidationError

from app.exceptions.CustomExceptions import DatasetParseError, SchemaError
from app.repositories.BaseRepository import BaseRepository
from app.schemas.data_schema import MAX_LENGTHS, MODALITIES, Dataset, Segment, SegmentRecord

logger = logging.getLogger(__name__)


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    where = ".".join(str(p) for p in error["loc"])
    return f"{where}: {error['msg']}" if where else error["msg"]


class DatasetRepository(BaseRepository[SegmentRecord]):
    """Segments stored one JSON object per line"""

    def __init__(self, path: str | Path):
        super().__init__(SegmentRecord, path)

    def _segment(self, line_number: int, line: str) -> Segment:
        try:
            record = SegmentRecord.model_validate_json(line)
        except ValidationError as exc:
            raise DatasetParseError(line_number, _first_error(exc)) from None
        features = {}
        for modality in MODALITIES:
            rows = getattr(record, modality.value)
            limit = MAX_LENGTHS[modality]
            if len(rows) > limit:
                logger.debug(f"line {line_number}: {modality.value} truncated {len(rows)} -> {limit}")
                rows = rows[:limit]
            features[modality.value] = rows
        try:
            return Segment(id=record.id, label=record.label, **features)
        except ValidationError as exc:
            raise DatasetParseError(line_number, _first_error(exc)) from None

    def load_jsonl(self, class_count: int | None = None) -> Dataset:
        """Parse the file; class count defaults to the largest label + 1"""
        try:
            text = self.read_text()
        except UnicodeDecodeError as exc:
            raise SchemaError(f"{self.path}: not UTF-8 text (byte {exc.start})") from None
        segments = [
            self._segment(number, line)
            for number, line in enumerate(text.splitlines(), start=1)
            if line.strip()
        ]
        if class_count is None:
            class_count = max([2, *(s.label + 1 for s in segments)])
        try:
            dataset = Dataset.from_segments(segments, class_count=class_count)
        except ValidationError as exc:
            raise SchemaError(f"{self.path}: {_first_error(exc)}") from None
        if len(dataset) == 0:
            logger.warning(f"{self.path} holds no segments")
        logger.info(f"loaded {len(dataset)} segments from {self.path}, widths {dataset.widths}")
        return dataset

    def save_jsonl(self, dataset: Dataset) -> Path:
        lines = [
            json.dumps(SegmentRecord.from_segment(s).model_dump(), separators=(",", ":"))
            for s in dataset.segments
        ]
        return self.write_text("".join(line + "\n" for line in lines))
