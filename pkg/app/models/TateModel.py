"""Tag-assisted transformer encoder network (student branch).

Per enabled modality: bias-free input projection, self-attention and mean
pooling give E_m. The common space maps each E_m with the two pairwise matrices
of the pairs it belongs to; the three common vectors and the tag digits form
E_all, which a one-sublayer transformer encodes into E_out (classified) and a
mirror sublayer decodes into D_out (reconstruction and tag recovery).
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from app.autograd import engine as ag
from app.autograd.engine import Node
from app.data.tags import encode_tag
from app.exceptions.CustomExceptions import ConfigError, ContractError
from app.models.Attention import MultiHeadAttention, TransformerSublayer
from app.models.BaseModel import BaseModel
from app.models.initializers import glorot_uniform, zeros
from app.schemas.config_schema import ModelConfig
from app.schemas.data_schema import MODALITIES, Modality, Segment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TateOutputs:
    e_all: Node
    e_out: Node
    d_out: Node
    probs: Node
    tags: np.ndarray


class TateModel(BaseModel):
    def __init__(self, config: ModelConfig, rng: np.random.Generator) -> None:
        super().__init__()
        self.config = config
        d, dc = config.hidden, config.common_width
        self.projections: dict[Modality, Node] = {}
        self.attentions: dict[Modality, MultiHeadAttention] = {}
        for m in config.modalities:
            self.projections[m] = self.add_parameter(
                f"input.{m.value}", glorot_uniform(rng, config.input_dim(m), d)
            )
            self.attentions[m] = MultiHeadAttention(
                self, f"attention.{m.value}", d, config.heads, rng
            )
        if config.use_common_space:
            # Shared by both modalities of each pair
            self.w_va = self.add_parameter("common.w_va", glorot_uniform(rng, d, dc))
            self.w_vt = self.add_parameter("common.w_vt", glorot_uniform(rng, d, dc))
            self.w_ta = self.add_parameter("common.w_ta", glorot_uniform(rng, d, dc))
        width = config.joint_width
        self.encoder = TransformerSublayer(self, "encoder", width, config.heads, config.dropout, rng)
        self.decoder = TransformerSublayer(self, "decoder", width, config.heads, config.dropout, rng)
        self.w_c = self.add_parameter("classifier.w", glorot_uniform(rng, width, config.class_count))
        self.b_c = self.add_parameter("classifier.b", zeros(1, config.class_count))

    def encode_modality(
        self,
        features: np.ndarray,
        modality: Modality,
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> Node:
        """[n × d_m] (masked) sequence -> [1 × d] representation"""
        if features.ndim != 2 or features.shape[0] == 0:
            raise ContractError(f"{modality.value} sequence must be non-empty, got shape {features.shape}")
        if modality not in self.projections:
            return Node(np.zeros((1, self.config.hidden)))
        projected = ag.matmul(Node(features), self.projections[modality])
        attended = self.attentions[modality].forward(projected, projected, projected)
        return ag.mean_pool(ag.dropout(attended, self.config.dropout, rng, training))

    def common_space_project(
        self, e_v: Node, e_a: Node, e_t: Node, tags: np.ndarray | None
    ) -> Node:
        """[B × d] modality rows (+ [B × 4] tags) -> E_all [B × joint width]"""
        if self.config.use_common_space:
            parts = [
                ag.concat([e_v @ self.w_va, e_v @ self.w_vt], axis=1),
                ag.concat([e_a @ self.w_va, e_a @ self.w_ta], axis=1),
                ag.concat([e_t @ self.w_vt, e_t @ self.w_ta], axis=1),
            ]
        else:
            parts = [e_v, e_a, e_t]
        if self.config.use_tag:
            if tags is None:
                raise ContractError("tag digits are required when the tag is enabled")
            parts.append(Node(np.asarray(tags, dtype=np.float64).reshape(-1, 4)))
        return ag.concat(parts, axis=1)

    def transformer_encode(
        self, e_all: Node, training: bool = False, rng: np.random.Generator | None = None
    ) -> Node:
        return self.encoder(e_all, training, rng)

    def transformer_decode(
        self, e_out: Node, training: bool = False, rng: np.random.Generator | None = None
    ) -> Node:
        return self.decoder(e_out, training, rng)

    def classify(self, e_out: Node) -> Node:
        return ag.softmax(e_out @ self.w_c + self.b_c, axis=1)

    def tags_for(self, segments: Sequence[Segment]) -> np.ndarray:
        return np.stack([encode_tag(s.missing).as_array() for s in segments])

    def forward(
        self,
        segments: Sequence[Segment],
        training: bool = False,
        rng: np.random.Generator | None = None,
    ) -> TateOutputs:
        if not segments:
            raise ContractError("forward needs at least one segment")
        rows: dict[Modality, Node] = {
            m: ag.concat(
                [self.encode_modality(s.features(m), m, training, rng) for s in segments], axis=0
            )
            for m in MODALITIES
        }
        tags = self.tags_for(segments)
        e_all = self.common_space_project(
            rows[Modality.VISUAL], rows[Modality.ACOUSTIC], rows[Modality.TEXTUAL], tags
        )
        e_out = self.transformer_encode(e_all, training, rng)
        d_out = self.transformer_decode(e_out, training, rng)
        return TateOutputs(e_all=e_all, e_out=e_out, d_out=d_out, probs=self.classify(e_out), tags=tags)

    def predict_proba(self, segments: Sequence[Segment]) -> np.ndarray:
        return self.forward(segments, training=False).probs.value.copy()

    def check_widths(self, visual_dim: int, acoustic_dim: int, textual_dim: int) -> None:
        given = {Modality.VISUAL: visual_dim, Modality.ACOUSTIC: acoustic_dim, Modality.TEXTUAL: textual_dim}
        for m in MODALITIES:
            if given[m] != self.config.input_dim(m):
                raise ConfigError(
                    f"{m.value} feature width {given[m]} does not match the network's {self.config.input_dim(m)}"
                )
