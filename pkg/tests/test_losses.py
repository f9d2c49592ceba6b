import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.autograd.engine import Node, backward
from app.autograd.gradcheck import finite_diff_check
from app.exceptions.CustomExceptions import ContractError, DimensionError
from app.losses.divergence import (
    PAIR_LOSSES,
    cosine_loss,
    js_divergence,
    kl_divergence,
    mean_absolute_error,
)
from app.losses.divergence import EPS
from app.losses.objective import TateObjective, backward_loss, cls_loss, forward_loss, tag_loss, total_loss
from app.schemas.config_schema import LossVariants, LossWeights


def test_kl_of_identical_distributions_is_zero():
    p = np.array([[0.2, 0.3, 0.5], [0.6, 0.3, 0.1]])
    assert abs(kl_divergence(p, p).item()) < 1e-9


def test_kl_rejects_non_distributions():
    with pytest.raises(ContractError):
        kl_divergence(np.array([[0.5, 0.6]]), np.array([[0.5, 0.5]]))


def test_js_is_symmetric(rng):
    a, b = rng.standard_normal((4, 6)), rng.standard_normal((4, 6))
    assert abs(js_divergence(a, b).item() - js_divergence(b, a).item()) < 1e-12
    assert js_divergence(a, b).item() > 0


def test_pair_losses_need_equal_shapes():
    with pytest.raises(DimensionError):
        js_divergence(np.ones((2, 3)), np.ones((2, 4)))


def test_mae_and_cosine_values():
    a = np.array([[1.0, 0.0]])
    assert_allclose(mean_absolute_error(a, np.array([[0.0, 0.0]])).item(), 0.5)
    assert abs(cosine_loss(a, a).item()) < 1e-7
    assert_allclose(cosine_loss(a, np.array([[0.0, 2.0]])).item(), 1.0, atol=1e-7)


def test_uniform_prediction_cross_entropy_is_ln3():
    probs = Node(np.full((4, 3), 1.0 / 3.0))
    assert abs(cls_loss(probs, [0, 1, 2, 1]).item() - math.log(3)) < 1e-9


def test_cross_entropy_rejects_labels_out_of_range():
    with pytest.raises(ContractError):
        cls_loss(Node(np.full((1, 3), 1.0 / 3.0)), [3])


def test_total_loss_weighting():
    weights = LossWeights(lambda1=0.1, lambda2=0.1, lambda3=0.1)
    assert abs(total_loss(1.0, 2.0, 3.0, 4.0, weights) - 1.9) < 1e-12


def test_total_loss_refuses_missing_weighted_term():
    with pytest.raises(ContractError):
        total_loss(1.0, None, 3.0, 4.0, LossWeights())
    assert total_loss(1.0, None, None, None, LossWeights(lambda1=0, lambda2=0, lambda3=0)) == 1.0


def test_tag_loss_reads_last_four_outputs():
    d_out = np.zeros((1, 7))
    d_out[0, -4:] = [30.0, -30.0, -30.0, -30.0]
    assert tag_loss(np.array([[1, 0, 0, 0]]), Node(d_out)).item() < 1e-12
    d_out[0, 0] = 100.0
    assert tag_loss(np.array([[1, 0, 0, 0]]), Node(d_out)).item() < 1e-12


@pytest.mark.parametrize("variant", ["js", "mae", "cosine"])
def test_pair_loss_gradients(variant, rng):
    a = Node.parameter(rng.standard_normal((3, 5)), name="a")
    b = Node.parameter(rng.standard_normal((3, 5)), name="b")
    assert finite_diff_check(lambda: PAIR_LOSSES[variant](a, b), [a, b]) < 1e-6


def test_active_terms_follow_weights():
    full = TateObjective(LossWeights(), LossVariants())
    assert full.active_terms() == ["cls", "forward", "backward", "tag"]
    no_tag_loss = TateObjective(LossWeights(lambda3=0.0), LossVariants())
    assert no_tag_loss.active_terms() == ["cls", "forward", "backward"]
    no_tag = TateObjective(LossWeights(), LossVariants(), use_tag=False)
    assert no_tag.active_terms() == ["cls", "forward", "backward"]
    plain = TateObjective(LossWeights(lambda1=0, lambda2=0, lambda3=0), LossVariants())
    assert plain.active_terms() == ["cls"]


def _symmetrized_kl(a: np.ndarray, b: np.ndarray) -> float:
    def softmax(x):
        e = np.exp(x - x.max(axis=1, keepdims=True))
        return e / e.sum(axis=1, keepdims=True)

    pa, pb = softmax(a), softmax(b)
    total = 0.0
    for row_a, row_b in zip(pa, pb):
        for x, y in zip(row_a, row_b):
            total += 0.5 * (x * (math.log(x + EPS) - math.log(y + EPS)) + y * (math.log(y + EPS) - math.log(x + EPS)))
    return total / len(pa)


def test_kl_of_a_point_mass_against_uniform_is_ln2():
    assert abs(kl_divergence(np.array([[1.0, 0.0]]), np.array([[0.5, 0.5]])).item() - math.log(2)) < 1e-6


def test_kl_is_not_symmetric():
    p, q = np.array([[0.9, 0.1]]), np.array([[0.5, 0.5]])
    forward, reverse = kl_divergence(p, q).item(), kl_divergence(q, p).item()
    assert forward == pytest.approx(0.9 * math.log(1.8) + 0.1 * math.log(0.2), abs=1e-6)
    assert abs(forward - reverse) > 0.01


@pytest.mark.parametrize("loss", [forward_loss, backward_loss])
def test_distillation_losses_vanish_on_equal_inputs(loss, rng):
    e = rng.standard_normal((4, 9))
    assert abs(loss(Node(e), Node(e.copy())).item()) < 1e-12


@pytest.mark.parametrize("loss", [forward_loss, backward_loss])
def test_distillation_losses_match_scalar_recomputation(loss, rng):
    a, b = rng.standard_normal((3, 7)), rng.standard_normal((3, 7))
    assert_allclose(loss(Node(a), Node(b)).item(), _symmetrized_kl(a, b), rtol=0, atol=1e-12)


def test_forward_loss_leaves_the_teacher_without_gradient(rng):
    e_out = Node.parameter(rng.standard_normal((2, 6)), name="student")
    e_pre = Node.parameter(rng.standard_normal((2, 6)), name="teacher")
    leaves = backward(forward_loss(e_out, e_pre))
    assert list(leaves) == [e_out]
    assert np.any(e_out.grad != 0)
    assert_allclose(e_pre.grad, 0.0)


def test_tag_loss_of_a_zero_tail_is_one_half():
    assert tag_loss(np.array([[1, 0, 0, 0]]), Node(np.zeros((1, 8)))).item() == 0.5
