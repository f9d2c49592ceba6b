"""Divergences between rows of real-valued vectors.

Inputs are [B × W] batches (or single [W] vectors); every function returns the
batch mean of the per-row value as a scalar node.
"""

from typing import Any

import numpy as np

from app.autograd import engine as ag
from app.autograd.engine import Node
from app.exceptions.CustomExceptions import ContractError, DimensionError

# Added inside every logarithm and norm
EPS = 1e-8


def _pair(op: str, a: Any, b: Any) -> tuple[Node, Node]:
    a, b = ag.lift(a), ag.lift(b)
    if a.shape != b.shape:
        raise DimensionError(op, a.shape, b.shape)
    return a, b


def _check_distribution(name: str, p: Node) -> None:
    if np.any(p.value < 0):
        raise ContractError(f"{name} has negative entries")
    if np.any(np.abs(p.value.sum(axis=-1) - 1.0) > 1e-9):
        raise ContractError(f"{name} does not sum to 1 along its last axis")


def kl_divergence(p: Any, q: Any) -> Node:
    """Σ p · (log(p + ε) − log(q + ε)) over the last axis"""
    p, q = _pair("kl_divergence", p, q)
    _check_distribution("p", p)
    _check_distribution("q", q)
    ratio = ag.log(p + EPS) - ag.log(q + EPS)
    return ag.mean(ag.sum(p * ratio, axis=-1))


def js_divergence(a: Any, b: Any) -> Node:
    """½(KL(a′‖b′) + KL(b′‖a′)) of the softmax-normalized inputs"""
    a, b = _pair("js_divergence", a, b)
    pa, pb = ag.softmax(a, axis=-1), ag.softmax(b, axis=-1)
    return (kl_divergence(pa, pb) + kl_divergence(pb, pa)) * 0.5


def mean_absolute_error(a: Any, b: Any) -> Node:
    a, b = _pair("mean_absolute_error", a, b)
    return ag.mean(ag.absolute(a - b))


def cosine_loss(a: Any, b: Any) -> Node:
    """1 − cos(a, b) per row"""
    a, b = _pair("cosine_loss", a, b)
    dot = ag.sum(a * b, axis=-1)
    norm_a = ag.sqrt(ag.sum(a * a, axis=-1) + EPS)
    norm_b = ag.sqrt(ag.sum(b * b, axis=-1) + EPS)
    return ag.mean(1.0 - dot / (norm_a * norm_b))


PAIR_LOSSES = {
    "js": js_divergence,
    "mae": mean_absolute_error,
    "cosine": cosine_loss,
}
