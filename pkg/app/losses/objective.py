import logging
from dataclasses import dataclass

import numpy as np

from app.autograd import engine as ag
from app.autograd.engine import Node
from app.exceptions.CustomExceptions import ConfigError, ContractError, DimensionError
from app.losses.divergence import PAIR_LOSSES
from app.models.TateModel import TateOutputs
from app.schemas.config_schema import LossVariants, LossWeights

logger = logging.getLogger(__name__)

Term = Node | float

# Keeps log finite when a probability underflows to zero
PROB_FLOOR = np.finfo(np.float64).tiny


def _as_rows(x: Node) -> Node:
    return ag.reshape(x, (1, -1)) if x.value.ndim == 1 else x


def _pair_loss(variant: str):
    try:
        return PAIR_LOSSES[variant]
    except KeyError:
        raise ConfigError(f"unknown loss variant '{variant}'") from None


def forward_loss(e_out: Node, e_pre: Node | np.ndarray, variant: str = "js") -> Node:
    """Distance of the encoder output to the frozen teacher representation"""
    target = Node(np.asarray(e_pre.value if isinstance(e_pre, Node) else e_pre))
    if e_out.shape != target.shape:
        raise DimensionError("forward_loss", e_out.shape, target.shape)
    return _pair_loss(variant)(e_out, target)


def backward_loss(d_out: Node, e_all: Node, variant: str = "js") -> Node:
    """Reconstruction of the joint representation by the decoder"""
    if d_out.shape != e_all.shape:
        raise DimensionError("backward_loss", d_out.shape, e_all.shape)
    return _pair_loss(variant)(d_out, e_all)


def tag_loss(tags: np.ndarray, d_out: Node, variant: str = "mae") -> Node:
    """Recovery of the tag digits from sigmoid of the decoder's last four outputs"""
    d_out = _as_rows(d_out)
    if d_out.shape[1] < 4:
        raise ContractError(f"decoder output too narrow for a tag: {d_out.shape}")
    target = np.asarray(tags, dtype=np.float64).reshape(-1, 4)
    if target.shape[0] != d_out.shape[0]:
        raise DimensionError("tag_loss", target.shape, d_out.shape)
    recovered = ag.sigmoid(d_out[:, -4:])
    if variant == "mae":
        return ag.mean(ag.absolute(Node(target) - recovered))
    return _pair_loss(variant)(Node(target), recovered)


def cls_loss(probs: Node, labels: np.ndarray | list[int]) -> Node:
    """Mean negative log-likelihood of the true classes"""
    probs = _as_rows(probs)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    batch, classes = probs.shape
    if labels.shape[0] != batch:
        raise DimensionError("cls_loss", probs.shape, labels.shape)
    if np.any(labels < 0) or np.any(labels >= classes):
        raise ContractError(f"labels must lie in [0, {classes}), got {labels.tolist()}")
    one_hot = np.zeros((batch, classes))
    one_hot[np.arange(batch), labels] = 1.0
    picked = ag.sum(probs * one_hot, axis=1)
    return -ag.mean(ag.log(picked + PROB_FLOOR))


def total_loss(cls: Term, fwd: Term | None, bwd: Term | None, tag: Term | None, w: LossWeights) -> Term:
    """cls + λ1·forward + λ2·backward + λ3·tag; absent terms need a zero weight"""
    total = cls
    for term, weight, name in ((fwd, w.lambda1, "forward"), (bwd, w.lambda2, "backward"), (tag, w.lambda3, "tag")):
        if term is None:
            if weight:
                raise ContractError(f"{name} term has weight {weight} but was not computed")
            continue
        total = total + weight * term
    return total


@dataclass(frozen=True)
class LossBreakdown:
    terms: dict[str, Node]
    total: Node

    def values(self) -> dict[str, float]:
        return {name: node.item() for name, node in self.terms.items()}


class TateObjective:
    """The weighted training objective; a zero weight removes its term entirely"""

    def __init__(self, weights: LossWeights, variants: LossVariants, use_tag: bool = True) -> None:
        self.weights = weights
        self.variants = variants
        self.use_tag = use_tag
        if not use_tag and weights.lambda3 > 0:
            logger.info("tag disabled: tag recovery loss dropped")

    def active_terms(self) -> list[str]:
        terms = ["cls"]
        if self.weights.lambda1 > 0:
            terms.append("forward")
        if self.weights.lambda2 > 0:
            terms.append("backward")
        if self.weights.lambda3 > 0 and self.use_tag:
            terms.append("tag")
        return terms

    def __call__(self, outputs: TateOutputs, e_pre: np.ndarray | None, labels: np.ndarray) -> LossBreakdown:
        active = self.active_terms()
        terms: dict[str, Node] = {"cls": cls_loss(outputs.probs, labels)}
        if "forward" in active:
            if e_pre is None:
                raise ContractError("forward loss needs the teacher representation")
            terms["forward"] = forward_loss(outputs.e_out, e_pre, self.variants.forward)
        if "backward" in active:
            terms["backward"] = backward_loss(outputs.d_out, outputs.e_all, self.variants.backward)
        if "tag" in active:
            terms["tag"] = tag_loss(outputs.tags, outputs.d_out, self.variants.tag)
        weights = self.weights if self.use_tag else self.weights.model_copy(update={"lambda3": 0.0})
        total = total_loss(
            terms["cls"], terms.get("forward"), terms.get("backward"), terms.get("tag"), weights
        )
        return LossBreakdown(terms=terms, total=ag.lift(total))
