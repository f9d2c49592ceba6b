"""Dense float64 tensors with reverse-mode automatic differentiation.

Every forward quantity of the network is a ``Node``: a numpy float64 array plus
the rule that maps the gradient of its output back onto its parents. Nodes whose
ancestry holds no trainable parameter are built without parents, so constant
sub-expressions never enter the differentiation graph.

A graph belongs to one thread. Plain tensors (numpy arrays) that are not attached
to a graph are treated as immutable.
"""

import logging
from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
import numpy.typing as npt

from app.exceptions.CustomExceptions import ContractError, DimensionError, DomainError

logger = logging.getLogger(__name__)

Tensor = npt.NDArray[np.float64]
BackwardRule = Callable[[Tensor], Sequence[Tensor | None]]


def as_tensor(value: Any) -> Tensor:
    return np.array(value, dtype=np.float64, copy=True, order="C")


class Node:
    __slots__ = ("value", "_grad", "parents", "backward_rule", "requires_grad", "op", "name")

    def __init__(
        self,
        value: Any,
        parents: tuple["Node", ...] = (),
        backward_rule: BackwardRule | None = None,
        op: str = "leaf",
        requires_grad: bool = False,
        name: str | None = None,
    ) -> None:
        self.value: Tensor = value if _is_owned(value) else as_tensor(value)
        self._grad: Tensor | None = None
        self.parents = parents
        self.backward_rule = backward_rule
        self.requires_grad = requires_grad
        self.op = op
        self.name = name

    @classmethod
    def parameter(cls, value: Any, name: str | None = None) -> "Node":
        return cls(as_tensor(value), requires_grad=True, name=name)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    @property
    def grad(self) -> Tensor:
        """Gradient slot, zero until a backward pass reaches this node"""
        if self._grad is None:
            self._grad = np.zeros_like(self.value)
        return self._grad

    def zero_grad(self) -> None:
        self._grad = None

    def accumulate(self, grad: Tensor) -> None:
        if self._grad is None:
            self._grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self._grad += grad

    def item(self) -> float:
        if self.value.size != 1:
            raise ContractError(f"item() needs a scalar node, got shape {self.shape}")
        return float(self.value.reshape(-1)[0])

    def backward(self) -> dict["Node", Tensor]:
        return backward(self)

    def __add__(self, other: Any) -> "Node":
        return add(self, other)

    def __radd__(self, other: Any) -> "Node":
        return add(other, self)

    def __sub__(self, other: Any) -> "Node":
        return sub(self, other)

    def __rsub__(self, other: Any) -> "Node":
        return sub(other, self)

    def __mul__(self, other: Any) -> "Node":
        return mul(self, other)

    def __rmul__(self, other: Any) -> "Node":
        return mul(other, self)

    def __truediv__(self, other: Any) -> "Node":
        return div(self, other)

    def __neg__(self) -> "Node":
        return mul(self, -1.0)

    def __matmul__(self, other: Any) -> "Node":
        return matmul(self, other)

    def __getitem__(self, index: Any) -> "Node":
        return take(self, index)

    def __repr__(self) -> str:
        label = self.name or self.op
        return f"Node({label}, shape={self.shape}, requires_grad={self.requires_grad})"


def _is_owned(value: Any) -> bool:
    return (
        isinstance(value, np.ndarray)
        and value.dtype == np.float64
        and value.flags.c_contiguous
        and value.flags.writeable
    )


def lift(value: Any) -> Node:
    return value if isinstance(value, Node) else Node(value)


def _make(value: Tensor, parents: tuple[Node, ...], rule: BackwardRule, op: str) -> Node:
    if any(p.requires_grad for p in parents):
        return Node(value, parents, rule, op, requires_grad=True)
    return Node(value, op=op)


def _unbroadcast(grad: Tensor, shape: tuple[int, ...]) -> Tensor:
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _broadcast_check(op: str, a: Node, b: Node) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise DimensionError(op, a.shape, b.shape) from None


def _check_axis(x: Node, axis: int) -> int:
    if not -x.value.ndim <= axis < x.value.ndim:
        raise ContractError(f"axis {axis} is invalid for shape {x.shape}")
    return axis % x.value.ndim


# arithmetic


def add(a: Any, b: Any) -> Node:
    a, b = lift(a), lift(b)
    _broadcast_check("add", a, b)
    return _make(
        a.value + b.value,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
        "add",
    )


def sub(a: Any, b: Any) -> Node:
    a, b = lift(a), lift(b)
    _broadcast_check("sub", a, b)
    return _make(
        a.value - b.value,
        (a, b),
        lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
        "sub",
    )


def mul(a: Any, b: Any) -> Node:
    a, b = lift(a), lift(b)
    _broadcast_check("mul", a, b)
    return _make(
        a.value * b.value,
        (a, b),
        lambda g: (_unbroadcast(g * b.value, a.shape), _unbroadcast(g * a.value, b.shape)),
        "mul",
    )


def div(a: Any, b: Any) -> Node:
    a, b = lift(a), lift(b)
    _broadcast_check("div", a, b)
    if np.any(b.value == 0):
        raise DomainError("division by zero")
    return _make(
        a.value / b.value,
        (a, b),
        lambda g: (
            _unbroadcast(g / b.value, a.shape),
            _unbroadcast(-g * a.value / (b.value * b.value), b.shape),
        ),
        "div",
    )


def matmul(a: Any, b: Any) -> Node:
    """Matrix product of an [m×k] and a [k×n] node"""
    a, b = lift(a), lift(b)
    if a.value.ndim != 2 or b.value.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError("matmul", a.shape, b.shape)
    return _make(
        a.value @ b.value,
        (a, b),
        lambda g: (g @ b.value.T, a.value.T @ g),
        "matmul",
    )


def transpose(x: Any) -> Node:
    x = lift(x)
    if x.value.ndim != 2:
        raise ContractError(f"transpose needs a matrix, got shape {x.shape}")
    return _make(np.ascontiguousarray(x.value.T), (x,), lambda g: (g.T,), "transpose")


# activations and pointwise functions


def softmax(x: Any, axis: int = -1) -> Node:
    """Softmax along ``axis`` with max-subtraction"""
    x = lift(x)
    axis = _check_axis(x, axis)
    shifted = x.value - x.value.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=axis, keepdims=True)
    return _make(
        s,
        (x,),
        lambda g: (s * (g - (g * s).sum(axis=axis, keepdims=True)),),
        "softmax",
    )


def relu(x: Any) -> Node:
    x = lift(x)
    mask = x.value > 0
    return _make(np.where(mask, x.value, 0.0), (x,), lambda g: (g * mask,), "relu")


def sigmoid(x: Any) -> Node:
    x = lift(x)
    e = np.exp(-np.abs(x.value))
    s = np.where(x.value >= 0, 1.0 / (1.0 + e), e / (1.0 + e))
    return _make(s, (x,), lambda g: (g * s * (1.0 - s),), "sigmoid")


def absolute(x: Any) -> Node:
    x = lift(x)
    sign = np.sign(x.value)
    return _make(np.abs(x.value), (x,), lambda g: (g * sign,), "abs")


def log(x: Any) -> Node:
    """Natural log; callers add their epsilon before calling"""
    x = lift(x)
    if np.any(x.value <= 0):
        raise DomainError(f"log of non-positive value (min {float(x.value.min())})")
    return _make(np.log(x.value), (x,), lambda g: (g / x.value,), "log")


def exp(x: Any) -> Node:
    x = lift(x)
    out = np.exp(x.value)
    return _make(out, (x,), lambda g: (g * out,), "exp")


def sqrt(x: Any) -> Node:
    x = lift(x)
    if np.any(x.value <= 0):
        raise DomainError(f"sqrt of non-positive value (min {float(x.value.min())})")
    out = np.sqrt(x.value)
    return _make(out, (x,), lambda g: (g / (2.0 * out),), "sqrt")


# reductions and structure


def sum(x: Any, axis: int | None = None, keepdims: bool = False) -> Node:  # noqa: A001
    x = lift(x)
    if axis is not None:
        axis = _check_axis(x, axis)

    def rule(g: Tensor) -> tuple[Tensor]:
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    return _make(np.asarray(x.value.sum(axis=axis, keepdims=keepdims)), (x,), rule, "sum")


def mean(x: Any, axis: int | None = None, keepdims: bool = False) -> Node:
    x = lift(x)
    count = x.value.size if axis is None else x.shape[_check_axis(x, axis)]
    return mul(sum(x, axis=axis, keepdims=keepdims), 1.0 / count)


def mean_pool(x: Any) -> Node:
    """Average a [n×d] sequence over time into a [1×d] row"""
    x = lift(x)
    if x.value.ndim != 2 or x.shape[0] == 0:
        raise ContractError(f"mean_pool needs a non-empty [n×d] sequence, got shape {x.shape}")
    return mean(x, axis=0, keepdims=True)


def concat(nodes: Sequence[Any], axis: int = -1) -> Node:
    parts = [lift(n) for n in nodes]
    if not parts:
        raise ContractError("concat needs at least one operand")
    axis = _check_axis(parts[0], axis)
    head = parts[0]
    for other in parts[1:]:
        same_rank = other.value.ndim == head.value.ndim
        if not same_rank or any(
            i != axis and s != t for i, (s, t) in enumerate(zip(head.shape, other.shape))
        ):
            raise DimensionError("concat", head.shape, other.shape)
    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]
    return _make(
        np.concatenate([p.value for p in parts], axis=axis),
        tuple(parts),
        lambda g: tuple(np.split(g, bounds, axis=axis)),
        "concat",
    )


def take(x: Any, index: Any) -> Node:
    """Basic slicing; the gradient is scattered back into the sliced positions"""
    x = lift(x)
    out = np.array(x.value[index], dtype=np.float64, copy=True)

    def rule(g: Tensor) -> tuple[Tensor]:
        full = np.zeros_like(x.value)
        np.add.at(full, index, g)
        return (full,)

    return _make(out, (x,), rule, "slice")


def reshape(x: Any, shape: tuple[int, ...]) -> Node:
    x = lift(x)
    return _make(x.value.reshape(shape).copy(), (x,), lambda g: (g.reshape(x.shape),), "reshape")


def dropout(x: Any, p: float, rng: np.random.Generator | None, training: bool) -> Node:
    """Inverted dropout; identity outside training mode"""
    x = lift(x)
    if not training or p <= 0.0:
        return x
    if rng is None:
        raise ContractError("dropout in training mode needs a random generator")
    keep = (rng.random(x.shape) >= p).astype(np.float64) / (1.0 - p)
    return mul(x, Node(keep))


_ELEMENTWISE: dict[str, Callable[..., Node]] = {
    "relu": relu,
    "sigmoid": sigmoid,
    "add": add,
    "mul": mul,
    "sub": sub,
    "abs": absolute,
    "log": log,
    "mean_pool": mean_pool,
    "concat": lambda *xs, axis=-1: concat(xs, axis=axis),
    "slice": take,
}


def elementwise(kind: str, *operands: Any, **kwargs: Any) -> Node:
    """Dispatch a pointwise or structural operation by name"""
    try:
        fn = _ELEMENTWISE[kind]
    except KeyError:
        raise ContractError(f"unknown elementwise kind '{kind}'") from None
    return fn(*operands, **kwargs)


# reverse pass


def _topological_order(root: Node) -> list[Node]:
    order: list[Node] = []
    visited: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(root: Node) -> dict[Node, Tensor]:
    """Propagate d(root)/d(node) to every reachable node.

    Gradients add onto whatever the nodes already hold; zero them between
    optimizer steps. Returns the accumulated gradients of the trainable leaves.
    """
    if root.value.size != 1:
        raise ContractError(f"backward needs a scalar root, got shape {root.shape}")
    pending: dict[int, Tensor] = {id(root): np.ones_like(root.value)}
    leaves: dict[Node, Tensor] = {}
    for node in reversed(_topological_order(root)):
        g = pending.pop(id(node), None)
        if g is None:
            continue
        node.accumulate(g)
        if node.backward_rule is None:
            if node.requires_grad:
                leaves[node] = node.grad
            continue
        for parent, parent_grad in zip(node.parents, node.backward_rule(g)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            pending[key] = pending[key] + parent_grad if key in pending else parent_grad
    return leaves
