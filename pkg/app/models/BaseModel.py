from typing import Any

import numpy as np

from app.autograd.engine import Node
from app.exceptions.CustomExceptions import CheckpointError


class BaseModel:
    """Base class for networks: a flat, ordered registry of named parameters"""

    def __init__(self) -> None:
        self._parameters: dict[str, Node] = {}
        self.trained = False

    def add_parameter(self, name: str, value: np.ndarray) -> Node:
        if name in self._parameters:
            raise ValueError(f"parameter '{name}' registered twice")
        node = Node.parameter(value, name=name)
        self._parameters[name] = node
        return node

    def named_parameters(self) -> dict[str, Node]:
        return dict(self._parameters)

    def parameters(self) -> list[Node]:
        return list(self._parameters.values())

    def parameter_count(self) -> int:
        return int(sum(p.value.size for p in self._parameters.values()))

    def parameter_groups(self) -> dict[str, list[str]]:
        """Parameters keyed by their name without the last component"""
        groups: dict[str, list[str]] = {}
        for name in self._parameters:
            groups.setdefault(name.rsplit(".", 1)[0], []).append(name)
        return groups

    def zero_grad(self) -> None:
        for p in self._parameters.values():
            p.zero_grad()

    def freeze(self) -> None:
        for p in self._parameters.values():
            p.requires_grad = False
            p.zero_grad()

    def to_dict(self) -> dict[str, np.ndarray]:
        """Copy of every parameter value"""
        return {name: p.value.copy() for name, p in self._parameters.items()}

    def load_dict(self, values: dict[str, Any]) -> None:
        missing = set(self._parameters) - set(values)
        unexpected = set(values) - set(self._parameters)
        if missing or unexpected:
            raise CheckpointError(
                f"parameter names do not match the network: missing {sorted(missing)}, "
                f"unexpected {sorted(unexpected)}"
            )
        for name, p in self._parameters.items():
            array = np.asarray(values[name], dtype=np.float64)
            if array.shape != p.shape:
                raise CheckpointError(f"parameter '{name}' has shape {array.shape}, expected {p.shape}")
            if not np.all(np.isfinite(array)):
                raise CheckpointError(f"parameter '{name}' holds non-finite values")
            p.value[...] = array

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.parameter_count()} parameters>"
