import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.autograd import engine as ag
from app.autograd.engine import Node, backward
from app.autograd.gradcheck import finite_diff_check, finite_diff_report
from app.exceptions.CustomExceptions import ConfigError, ContractError, DimensionError, DomainError


def test_sum_of_square_gradient(rng):
    x = Node.parameter(rng.standard_normal((3, 4)))
    backward(ag.sum(x * x))
    assert_allclose(x.grad, 2 * x.value)


def test_backward_requires_scalar_root():
    x = Node.parameter(np.ones((2, 2)))
    with pytest.raises(ContractError):
        backward(x * 2.0)


def test_gradients_accumulate_until_zeroed():
    x = Node.parameter(np.array([[1.0, 2.0]]))
    backward(ag.sum(x * 3.0))
    backward(ag.sum(x * 3.0))
    assert_allclose(x.grad, [[6.0, 6.0]])
    x.zero_grad()
    assert_allclose(x.grad, [[0.0, 0.0]])


def test_shared_subexpression_gradient_adds_up():
    x = Node.parameter(np.array([[2.0]]))
    y = x * x
    backward(ag.sum(y + y))
    assert_allclose(x.grad, [[8.0]])


def test_constant_subgraph_has_no_parents():
    a = Node(np.ones((2, 2)))
    b = ag.relu(a @ a)
    assert b.parents == ()
    assert not b.requires_grad


def test_backward_returns_trainable_leaves_only(rng):
    w = Node.parameter(rng.standard_normal((3, 2)), name="w")
    x = Node(rng.standard_normal((4, 3)))
    leaves = backward(ag.mean(ag.relu(x @ w)))
    assert list(leaves) == [w]


def test_matmul_shape_mismatch():
    with pytest.raises(DimensionError) as info:
        ag.matmul(Node(np.ones((2, 3))), Node(np.ones((2, 3))))
    assert "(2, 3)" in info.value.detail


def test_log_of_non_positive_is_domain_error():
    with pytest.raises(DomainError):
        ag.log(Node(np.array([1.0, 0.0])))


def test_mean_pool_of_empty_sequence():
    with pytest.raises(ContractError):
        ag.mean_pool(Node(np.zeros((0, 3))))


def test_softmax_rows_sum_to_one(rng):
    s = ag.softmax(Node(rng.standard_normal((5, 7)) * 50), axis=1)
    assert_allclose(s.value.sum(axis=1), np.ones(5), atol=1e-12)


def test_softmax_of_ln2_offset():
    probs = ag.softmax(Node(np.array([[0.0, np.log(2.0)]])), axis=1)
    assert_allclose(probs.value, [[1 / 3, 2 / 3]], rtol=0, atol=1e-12)


def test_matmul_is_associative(rng):
    a, b, c = rng.standard_normal((4, 5)), rng.standard_normal((5, 3)), rng.standard_normal((3, 6))
    left = ((Node(a) @ Node(b)) @ Node(c)).value
    right = (Node(a) @ (Node(b) @ Node(c))).value
    assert np.max(np.abs(left - right)) < 1e-9


def test_elementwise_dispatch():
    x = Node(np.array([[-1.0, 2.0]]))
    assert_allclose(ag.elementwise("relu", x).value, [[0.0, 2.0]])
    assert_allclose(ag.elementwise("concat", x, x, axis=0).value, [[-1.0, 2.0], [-1.0, 2.0]])
    with pytest.raises(ContractError):
        ag.elementwise("tanh", x)


def test_dropout_is_identity_outside_training(rng):
    x = Node.parameter(rng.standard_normal((3, 3)))
    assert ag.dropout(x, 0.5, rng, training=False) is x


@pytest.mark.parametrize(
    "build",
    [
        lambda a, b: ag.sum(ag.softmax(a @ b, axis=1) * ag.sigmoid(a @ b)),
        lambda a, b: ag.mean(ag.log(ag.exp(a) + 1.0) * ag.absolute(a - 0.3)),
        lambda a, b: ag.sum(ag.concat([a, ag.transpose(b)], axis=0)[1:3] * 2.0),
        lambda a, b: ag.sum(ag.sqrt(ag.sum(a * a, axis=1) + 1.0) / (ag.mean(b * b) + 1.0)),
        lambda a, b: ag.sum(ag.reshape(ag.mean_pool(a @ b), (-1,)) - ag.relu(b[0])),
    ],
)
def test_gradients_match_finite_differences(build, rng):
    a = Node.parameter(rng.standard_normal((4, 3)), name="a")
    b = Node.parameter(rng.standard_normal((3, 4)), name="b")
    error = finite_diff_check(lambda: build(a, b), [a, b])
    assert error < 1e-6


def test_report_covers_every_parameter(rng):
    params = {
        "w": Node.parameter(rng.standard_normal((3, 3))),
        "v": Node.parameter(rng.standard_normal((3, 1))),
    }
    report = finite_diff_report(lambda: ag.sum(ag.sigmoid(params["w"] @ params["v"])), params, max_coords=4)
    assert set(report) == {"w", "v"}
    assert max(report.values()) < 1e-6


def test_corrupted_backward_rule_is_detected(monkeypatch, rng):
    def bad_relu(x):
        x = ag.lift(x)
        mask = x.value > 0
        return ag._make(np.where(mask, x.value, 0.0), (x,), lambda g: (g * 0.5 * mask,), "relu")

    monkeypatch.setattr(ag, "relu", bad_relu)
    w = Node.parameter(np.abs(rng.standard_normal((3, 3))) + 0.1)
    x = Node(np.abs(rng.standard_normal((2, 3))) + 1.0)
    assert finite_diff_check(lambda: ag.sum(ag.relu(x @ w) * ag.relu(x @ w)), [w]) > 1e-2


def test_non_positive_step_is_rejected():
    x = Node.parameter(np.ones((1, 1)))
    with pytest.raises(ConfigError):
        finite_diff_check(lambda: ag.sum(x), [x], eps=0.0)
