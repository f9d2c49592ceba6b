import math
from typing import TYPE_CHECKING

import numpy as np

from app.autograd import engine as ag
from app.autograd.engine import Node
from app.exceptions.CustomExceptions import ConfigError
from app.models.initializers import glorot_uniform, zeros

if TYPE_CHECKING:
    from app.models.BaseModel import BaseModel


class MultiHeadAttention:
    """Multi-head dot-product attention without biases.

    Head i reads its own contiguous block of input columns and projects it with
    square query, key and value matrices. When width divides evenly the blocks
    are width/heads wide and each projection is stored as one [heads × k × k]
    tensor; with ``uneven=True`` the columns are split as np.array_split does
    (leading blocks one column wider) and every head gets its own
    ``w_q{i}``/``w_k{i}``/``w_v{i}`` parameters. Head outputs are concatenated
    and mixed by the [width × width] output matrix. Scores are scaled by
    1/sqrt(width).
    """

    def __init__(
        self,
        owner: "BaseModel",
        prefix: str,
        width: int,
        heads: int,
        rng: np.random.Generator,
        uneven: bool = False,
    ) -> None:
        if heads < 1 or heads > width:
            raise ConfigError(f"cannot split attention width {width} into {heads} heads")
        if width % heads and not uneven:
            raise ConfigError(f"attention width {width} is not divisible by {heads} heads")
        self.width = width
        self.heads = heads
        self.bounds = [(int(c[0]), int(c[-1]) + 1) for c in np.array_split(np.arange(width), heads)]
        self.scale = 1.0 / math.sqrt(width)
        self.stacked = width % heads == 0
        if self.stacked:
            k = width // heads
            self.w_q = owner.add_parameter(f"{prefix}.w_q", glorot_uniform(rng, k, k, (heads, k, k)))
            self.w_k = owner.add_parameter(f"{prefix}.w_k", glorot_uniform(rng, k, k, (heads, k, k)))
            self.w_v = owner.add_parameter(f"{prefix}.w_v", glorot_uniform(rng, k, k, (heads, k, k)))
        else:
            self.w_q, self.w_k, self.w_v = (
                [
                    owner.add_parameter(f"{prefix}.{name}{i}", glorot_uniform(rng, stop - start, stop - start))
                    for i, (start, stop) in enumerate(self.bounds)
                ]
                for name in ("w_q", "w_k", "w_v")
            )
        self.w_o = owner.add_parameter(f"{prefix}.w_o", glorot_uniform(rng, width, width))

    @property
    def head_widths(self) -> list[int]:
        return [stop - start for start, stop in self.bounds]

    def _block(self, x: Node, i: int) -> Node:
        start, stop = self.bounds[i]
        return x[:, start:stop]

    def _project(self, x: Node, i: int) -> tuple[Node, Node, Node]:
        block = self._block(x, i)
        return block @ self.w_q[i], block @ self.w_k[i], block @ self.w_v[i]

    def forward(self, q: Node, k: Node, v: Node) -> Node:
        """Attention over one sequence: q, k, v are [n × width]"""
        for name, x in (("query", q), ("key", k), ("value", v)):
            if x.value.ndim != 2 or x.shape[1] != self.width or x.shape[0] < 1:
                raise ConfigError(f"attention {name} must be [n × {self.width}], got {x.shape}")
        heads = []
        for i in range(self.heads):
            q_i = self._block(q, i) @ self.w_q[i]
            k_i = self._block(k, i) @ self.w_k[i]
            v_i = self._block(v, i) @ self.w_v[i]
            weights = ag.softmax((q_i @ ag.transpose(k_i)) * self.scale, axis=1)
            heads.append(weights @ v_i)
        return ag.concat(heads, axis=1) @ self.w_o

    def forward_rows(self, x: Node) -> Node:
        """Self-attention of each row of x [B × width] as its own length-1 sequence"""
        heads = []
        for i in range(self.heads):
            q_i, k_i, v_i = self._project(x, i)
            logits = ag.sum(q_i * k_i, axis=1, keepdims=True) * self.scale
            weights = ag.softmax(logits, axis=1)
            heads.append(weights * v_i)
        return ag.concat(heads, axis=1) @ self.w_o


class TransformerSublayer:
    """Self-attention followed by a relu feed-forward block, no residuals"""

    def __init__(
        self,
        owner: "BaseModel",
        prefix: str,
        width: int,
        heads: int,
        dropout: float,
        rng: np.random.Generator,
    ) -> None:
        self.attention = MultiHeadAttention(owner, f"{prefix}.attention", width, heads, rng, uneven=True)
        self.w1 = owner.add_parameter(f"{prefix}.ff.w1", glorot_uniform(rng, width, width))
        self.b1 = owner.add_parameter(f"{prefix}.ff.b1", zeros(1, width))
        self.w2 = owner.add_parameter(f"{prefix}.ff.w2", glorot_uniform(rng, width, width))
        self.b2 = owner.add_parameter(f"{prefix}.ff.b2", zeros(1, width))
        self.dropout = dropout

    def __call__(self, x: Node, training: bool = False, rng: np.random.Generator | None = None) -> Node:
        attended = ag.dropout(self.attention.forward_rows(x), self.dropout, rng, training)
        hidden = ag.relu(attended @ self.w1 + self.b1)
        return ag.dropout(hidden @ self.w2 + self.b2, self.dropout, rng, training)
