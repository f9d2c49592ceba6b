"""Bias-corrected Adam over named parameter nodes."""

import logging
from dataclasses import dataclass, field

import numpy as np

from app.autograd.engine import Node
from app.exceptions.CustomExceptions import NonFiniteGradientError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(
    params: dict[str, Node],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
) -> None:
    """Update ``params`` in place; nothing changes if any gradient is non-finite"""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            logger.error(f"non-finite gradient for '{name}' at step {state.step + 1}")
            raise NonFiniteGradientError(name)

    state.step += 1
    bc1 = 1.0 - state.beta1**state.step
    bc2 = 1.0 - state.beta2**state.step
    for name, p in params.items():
        g = grads.get(name)
        if g is None:
            g = np.zeros_like(p.value)
        if name not in state.m:
            state.m[name] = np.zeros_like(p.value)
            state.v[name] = np.zeros_like(p.value)
        m, v = state.m[name], state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * (g * g)
        p.value -= lr * (m / bc1) / (np.sqrt(v / bc2) + state.eps)


class Adam:
    def __init__(
        self,
        params: dict[str, Node],
        lr: float = 0.001,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        self.params = params
        self.lr = lr
        self.state = AdamState(beta1=beta1, beta2=beta2, eps=eps)

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.zero_grad()

    def step(self) -> None:
        grads = {name: p.grad for name, p in self.params.items()}
        adam_step(self.params, grads, self.state, self.lr)
