"""
Finite-difference oracle for the analytic gradients of the engine.

The objective is a zero-argument callable that rebuilds the graph from the
current parameter values, so perturbing a parameter in place and calling it
again evaluates the objective at the shifted point. A centered difference is
used for every checked coordinate.
"""

import logging
from collections.abc import Callable, Mapping, Sequence

import numpy as np

from app.autograd.engine import Node, backward
from app.exceptions.CustomExceptions import ConfigError

logger = logging.getLogger(__name__)

Objective = Callable[[], Node]


def finite_diff_report(
    f: Objective,
    params: Mapping[str, Node],
    eps: float = 1e-5,
    max_coords: int | None = None,
    seed: int = 0,
) -> dict[str, float]:
    """Max relative error |g_analytic - g_numeric| / max(1, |g_numeric|) per parameter"""
    if eps <= 0:
        raise ConfigError(f"finite difference step must be positive, got {eps}")
    rng = np.random.default_rng(seed)

    for p in params.values():
        p.zero_grad()
    backward(f())
    analytic = {name: p.grad.copy() for name, p in params.items()}
    for p in params.values():
        p.zero_grad()

    report: dict[str, float] = {}
    for name, p in params.items():
        flat = p.value.reshape(-1)
        coords = np.arange(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = np.sort(rng.choice(flat.size, size=max_coords, replace=False))
        expected = analytic[name].reshape(-1)
        worst = 0.0
        for i in coords:
            original = flat[i]
            flat[i] = original + eps
            f_plus = f().item()
            flat[i] = original - eps
            f_minus = f().item()
            flat[i] = original
            numeric = (f_plus - f_minus) / (2.0 * eps)
            worst = max(worst, abs(expected[i] - numeric) / max(1.0, abs(numeric)))
        report[name] = worst
        logger.debug(f"gradcheck {name}: {len(coords)} coords, max rel error {worst:.3e}")
    return report


def finite_diff_check(
    f: Objective,
    params: Sequence[Node],
    eps: float = 1e-5,
    max_coords: int | None = None,
    seed: int = 0,
) -> float:
    """Max relative gradient error over every coordinate of ``params``"""
    named = {p.name or f"param{i}": p for i, p in enumerate(params)}
    if len(named) != len(params):
        named = {f"param{i}": p for i, p in enumerate(params)}
    report = finite_diff_report(f, named, eps=eps, max_coords=max_coords, seed=seed)
    return max(report.values(), default=0.0)
