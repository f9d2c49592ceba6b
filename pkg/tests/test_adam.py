import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.autograd import engine as ag
from app.autograd.engine import Node, backward
from app.exceptions.CustomExceptions import NonFiniteGradientError
from app.optim.adam import Adam, AdamState, adam_step


def test_zero_gradient_leaves_parameters_unchanged():
    p = Node.parameter(np.array([[1.0, -2.0]]))
    state = AdamState()
    adam_step({"p": p}, {"p": np.zeros((1, 2))}, state, lr=0.001)
    assert_array_equal(p.value, [[1.0, -2.0]])
    assert_array_equal(state.m["p"], 0.0)
    assert_array_equal(state.v["p"], 0.0)


def test_first_step_moves_by_learning_rate():
    p = Node.parameter(np.zeros((1, 1)))
    adam_step({"p": p}, {"p": np.ones((1, 1))}, AdamState(), lr=0.001)
    assert_allclose(p.value, [[-0.001]], rtol=1e-6)


def test_parameters_update_independently():
    a, b = Node.parameter(np.zeros(2)), Node.parameter(np.zeros(2))
    alone = Node.parameter(np.zeros(2))
    adam_step({"a": a, "b": b}, {"a": np.array([1.0, -3.0]), "b": np.array([50.0, 0.2])}, AdamState(), 0.01)
    adam_step({"a": alone}, {"a": np.array([1.0, -3.0])}, AdamState(), 0.01)
    assert_array_equal(a.value, alone.value)


def test_non_finite_gradient_aborts_before_update():
    p = Node.parameter(np.ones(3))
    q = Node.parameter(np.ones(3))
    state = AdamState()
    with pytest.raises(NonFiniteGradientError) as info:
        adam_step({"p": p, "q": q}, {"p": np.ones(3), "q": np.array([0.0, np.nan, 0.0])}, state, 0.1)
    assert info.value.parameter == "q"
    assert info.value.exit_code == 5
    assert_array_equal(p.value, np.ones(3))
    assert state.step == 0


def test_optimizer_minimises_a_quadratic():
    x = Node.parameter(np.array([[3.0, -4.0]]))
    optimizer = Adam({"x": x}, lr=0.1)
    for _ in range(300):
        optimizer.zero_grad()
        backward(ag.sum(x * x))
        optimizer.step()
    assert np.all(np.abs(x.value) < 0.5)
