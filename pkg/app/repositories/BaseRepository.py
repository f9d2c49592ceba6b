import logging
from pathlib import Path
from typing import Generic, TypeVar

from pydantic import BaseModel

logger = logging.getLogger(__name__)

DocumentType = TypeVar("DocumentType", bound=BaseModel)


class BaseRepository(Generic[DocumentType]):
    """A pydantic document kept in one file"""

    document: type[DocumentType]
    path: Path

    def __init__(self, document: type[DocumentType], path: str | Path) -> None:
        self.document = document
        self.path = Path(path)

    def exists(self) -> bool:
        return self.path.is_file()

    def read_text(self) -> str:
        return self.path.read_text(encoding="utf-8")

    def write_text(self, text: str) -> Path:
        """Write the file, creating missing parent directories"""
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.debug(f"wrote {self.path}")
        return self.path

    def save(self, instance: DocumentType) -> Path:
        return self.write_text(instance.model_dump_json() + "\n")

    def load(self) -> DocumentType:
        return self.document.model_validate_json(self.read_text())
