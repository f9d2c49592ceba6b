from pydantic import BaseModel, ConfigDict, Field


class Metrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    accuracy: float
    macro_f1: float
    per_class_f1: list[float]
    confusion: list[list[int]] = Field(description="rows: true class, columns: predicted class")
    samples: int


class HistoryRow(BaseModel):
    """Mean loss terms over one epoch; absent terms were not active"""

    epoch: int
    terms: dict[str, float]
    total: float
    train_acc: float


class History(BaseModel):
    columns: list[str]
    rows: list[HistoryRow] = []

    def series(self, term: str) -> list[float]:
        if term == "total":
            return [r.total for r in self.rows]
        return [r.terms[term] for r in self.rows]


class SweepRow(BaseModel):
    eta: float
    mode: str
    m_f1: float
    acc: float
    metrics: Metrics


class GradCheckReport(BaseModel):
    tolerance: float
    groups: dict[str, float]

    @property
    def worst(self) -> float:
        return max(self.groups.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return self.worst < self.tolerance
