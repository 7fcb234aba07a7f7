import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from objnav.errors import ConfigError
from objnav.model.losses import motion_loss, motion_loss_grad, state_loss, \
    state_loss_grad


def test_motion_loss_single_sample():
    assert motion_loss([[0.5, 0, 0]], [[0.4, 0, 0]], beta=10) == pytest.approx(
        0.1, abs=1e-9)


def test_motion_loss_zero_when_equal():
    assert motion_loss([[0.3, 0.1, -0.2]], [[0.3, 0.1, -0.2]], beta=10) == 0.0


def test_motion_loss_mean_then_scale():
    # two samples with squared errors 0.01 and 0.03
    pred = [[0.1, 0, 0], [0.1, 0.1, 0.1]]
    true = [[0.0, 0, 0], [0.0, 0.0, 0.0]]
    assert motion_loss(pred, true, beta=10) == pytest.approx(0.2, abs=1e-9)


def test_motion_loss_requires_positive_beta():
    with pytest.raises(ConfigError):
        motion_loss([[0.0, 0, 0]], [[0.0, 0, 0]], beta=0.0)


@given(st.floats(min_value=0.01, max_value=50),
       st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=3),
       st.lists(st.floats(min_value=-1, max_value=1), min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_motion_loss_nonnegative_and_linear_in_beta(beta, p, t):
    base = motion_loss([p], [t], beta=1.0)
    scaled = motion_loss([p], [t], beta=beta)
    assert base >= 0.0
    assert scaled == pytest.approx(beta * base, rel=1e-9, abs=1e-12)
    assert (base == 0.0) == (p == t)


def test_state_loss_perfect_prediction():
    assert state_loss([[1.0, 0.0]], [0]) == 0.0


def test_state_loss_uniform_is_ln2():
    assert state_loss([[0.5, 0.5]], [0]) == pytest.approx(math.log(2), abs=1e-9)
    assert state_loss([[0.5, 0.5]], [1]) == pytest.approx(math.log(2), abs=1e-9)


def test_state_loss_direct_value():
    assert state_loss([[0.25, 0.75]], [1]) == pytest.approx(
        -math.log(0.75), abs=1e-9)


def test_state_loss_zero_probability_is_clamped():
    v = state_loss([[0.0, 1.0]], [0])
    assert v == pytest.approx(-math.log(1e-12))
    assert math.isfinite(v)


def test_state_loss_batch_mean():
    v = state_loss([[0.5, 0.5], [1.0, 0.0]], [0, 0])
    assert v == pytest.approx(math.log(2) / 2, abs=1e-12)


def test_motion_grad_matches_finite_difference():
    rng = np.random.default_rng(0)
    pred = rng.normal(size=(4, 3))
    true = rng.normal(size=(4, 3))
    _, grad = motion_loss_grad(pred, true, beta=10.0)
    eps = 1e-6
    for idx in [(0, 0), (1, 2), (3, 1)]:
        p = pred.copy()
        p[idx] += eps
        lp = motion_loss(p, true, beta=10.0)
        p[idx] -= 2 * eps
        lm = motion_loss(p, true, beta=10.0)
        assert grad[idx] == pytest.approx((lp - lm) / (2 * eps), rel=1e-5)


def test_state_grad_is_probs_minus_onehot_over_n():
    probs = np.array([[0.3, 0.7], [0.9, 0.1]])
    _, grad = state_loss_grad(probs.copy(), np.array([1, 0]))
    expect = np.array([[0.3, -0.3], [-0.1, 0.1]]) / 2
    assert np.allclose(grad, expect)
