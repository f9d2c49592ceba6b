from collections.abc import Sequence

import numpy as np

from app.autograd import engine as ag
from app.autograd.engine import Node
from app.exceptions.CustomExceptions import ContractError
from app.models.BaseModel import BaseModel
from app.models.initializers import glorot_uniform, zeros
from app.schemas.config_schema import ModelConfig
from app.schemas.data_schema import MODALITIES, Modality, Segment


class TeacherModel(BaseModel):
    """Full-modality network whose representation E_pre guides the student.

    Mean-pooled projections of the three modalities are concatenated and lifted
    to the student's joint width, then classified.
    """

    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        d, width = config.hidden, config.joint_width
        self.projections: dict[Modality, Node] = {
            m: self.add_parameter(f"input.{m.value}", glorot_uniform(rng, config.input_dim(m), d))
            for m in MODALITIES
        }
        self.w_lift = self.add_parameter("lift.w", glorot_uniform(rng, 3 * d, width))
        self.b_lift = self.add_parameter("lift.b", zeros(1, width))
        self.w_c = self.add_parameter("classifier.w", glorot_uniform(rng, width, config.class_count))
        self.b_c = self.add_parameter("classifier.b", zeros(1, config.class_count))

    @property
    def width(self) -> int:
        return int(self.w_lift.shape[1])

    def represent(self, segments: Sequence[Segment]) -> Node:
        """E_pre rows [B × joint width] for complete segments"""
        rows = []
        for segment in segments:
            if not segment.missing.is_complete:
                raise ContractError(
                    f"teacher sees complete data only; segment '{segment.id}' misses {segment.missing.label()}"
                )
            pooled = [
                ag.mean_pool(ag.matmul(Node(segment.features(m)), self.projections[m]))
                for m in MODALITIES
            ]
            rows.append(ag.concat(pooled, axis=1))
        return ag.concat(rows, axis=0) @ self.w_lift + self.b_lift

    def forward(self, segments: Sequence[Segment]) -> tuple[Node, Node]:
        e_pre = self.represent(segments)
        return e_pre, ag.softmax(e_pre @ self.w_c + self.b_c, axis=1)

    def teacher_forward(self, segment: Segment) -> tuple[np.ndarray, np.ndarray]:
        """(E_pre, class probabilities) of one complete segment"""
        e_pre, probs = self.forward([segment])
        return e_pre.value[0].copy(), probs.value[0].copy()
