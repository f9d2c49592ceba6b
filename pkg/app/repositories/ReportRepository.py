import csv
import io
import json
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from app.repositories.BaseRepository import BaseRepository
from app.schemas.metrics_schema import History, SweepRow


def _rows_to_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _number(value: float) -> str:
    return repr(float(value))


class ReportRepository(BaseRepository[History]):
    """CSV and JSON reports written next to each other"""

    def __init__(self, path: str | Path):
        super().__init__(History, path)

    def save_history(self, history: History) -> Path:
        header = ["epoch", *history.columns, "total", "train_acc"]
        rows = [
            [row.epoch, *(_number(row.terms[c]) for c in history.columns), _number(row.total), _number(row.train_acc)]
            for row in history.rows
        ]
        return self.write_text(_rows_to_csv(header, rows))

    def save_sweep(self, rows: Sequence[SweepRow]) -> tuple[Path, Path]:
        """Table of (eta, mode, M-F1, ACC) plus a JSON file with every metric"""
        table = [[_number(r.eta), r.mode, _number(r.m_f1), _number(r.acc)] for r in rows]
        csv_path = self.write_text(_rows_to_csv(["eta", "mode", "m_f1", "acc"], table))
        payload = [r.model_dump(mode="json") for r in rows]
        json_path = BaseRepository(SweepRow, self.path.with_suffix(".json")).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n"
        )
        return csv_path, json_path

    def save_embeddings(
        self, ids: Sequence[str], labels: Sequence[int], patterns: Sequence[str], vectors: np.ndarray
    ) -> Path:
        width = vectors.shape[1]
        header = ["id", "label", "pattern", *(f"e{i}" for i in range(width))]
        rows = [
            [segment_id, int(label), pattern, *(_number(v) for v in vector)]
            for segment_id, label, pattern, vector in zip(ids, labels, patterns, vectors)
        ]
        return self.write_text(_rows_to_csv(header, rows))
