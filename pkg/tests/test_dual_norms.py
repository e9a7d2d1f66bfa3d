import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chaosmoments.distributions import EXP_POWER, WEIBULL, make_distribution
from chaosmoments.dual_norms import (
    ConfigurationError,
    DualBall,
    ball,
    ball_membership,
    boundary_scale,
    brute_norm_Xp,
    brute_norm_XYp,
    conjugate_1d,
    norm_Xp,
    norm_Xp_dual,
    norm_XYp,
)
from chaosmoments.rng import stream

W1 = make_distribution(WEIBULL, 1.0)
W2 = make_distribution(WEIBULL, 2.0)
W3 = make_distribution(WEIBULL, 3.0)
E2 = make_distribution(EXP_POWER, 2.0)


def test_conjugate_small_coefficient_is_quadratic():
    # sup_x (a x - lam x^2) = a^2 / (4 lam) while the maximizer stays inside [-1, 1]
    val, x = conjugate_1d(W2, 1.0, 1.0)
    assert val == pytest.approx(0.25, abs=1e-9)
    assert x == pytest.approx(0.5, abs=1e-9)


def test_conjugate_knee_case():
    val, x = conjugate_1d(W2, 2.0, 1.0)
    assert val == pytest.approx(1.0, abs=1e-9)
    assert x == pytest.approx(1.0, abs=1e-9)


def test_conjugate_linear_tail_unbounded():
    # N(t) = t past the knee: a > lam makes a x - lam N(x) unbounded
    val, x = conjugate_1d(W1, 2.0, 1.0)
    assert val == math.inf


@pytest.mark.parametrize("a,lam", [(1.5, 0.7), (3.0, 1.2), (0.2, 2.0), (2.5, 0.4)])
@pytest.mark.parametrize("dist", [W2, W3, E2])
def test_conjugate_matches_grid_scan(a, lam, dist):
    xs = np.linspace(0.0, 60.0, 400_001)
    scan = (a * xs - lam * dist.hat_N(xs)).max()
    val, _ = conjugate_1d(dist, a, lam)
    assert val == pytest.approx(scan, rel=1e-4, abs=5e-4)


def test_norm_linear_tail_exact_value():
    # a = (1, 1), p = 2, linear tails: optimum splits the budget 1.75 / 0.25
    b = ball(W1, 2.0, 2)
    res = norm_Xp(np.array([1.0, 1.0]), b)
    assert res.value == pytest.approx(2.25, abs=1e-10)
    np.testing.assert_allclose(np.sort(res.maximizer), [0.5, 1.75], atol=1e-8)


def test_norm_gaussian_tail_closed_forms():
    b4 = ball(W2, 4.0, 2)
    assert norm_Xp(np.array([3.0, 4.0]), b4).value == pytest.approx(10.0, rel=1e-9)
    b9 = ball(W2, 9.0, 2)
    # gaussian tails make the ball sqrt(p) B_2, so the unit vector scores sqrt(9)
    assert norm_Xp(np.array([1.0, 0.0]), b9).value == pytest.approx(3.0, rel=1e-9)


def test_membership_at_linear_maximizer():
    b = ball(W1, 2.0, 2)
    inside, _ = ball_membership(np.array([1.75, 0.5]), b)
    assert inside
    outside, slack = ball_membership(np.array([1.8, 0.5]), b)
    assert not outside and slack < 0


def test_boundary_scale_lands_on_boundary():
    b = ball(W2, 3.0, 3)
    dirs = stream(3, 0).standard_normal((20, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    pts = dirs * boundary_scale(dirs, b)[:, None]
    sums = np.array([b.hat_N_sum(x) for x in pts])
    np.testing.assert_allclose(sums, b.p, rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(
    a=st.lists(st.floats(-5.0, 5.0), min_size=1, max_size=4),
    scale=st.floats(0.1, 10.0),
)
def test_norm_positive_homogeneous(a, scale):
    a = np.asarray(a)
    b = ball(W2, 3.0, a.size)
    base = norm_Xp(a, b).value
    scaled = norm_Xp(scale * a, b).value
    assert scaled == pytest.approx(scale * base, rel=1e-8, abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(
    a=st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=4),
    c=st.lists(st.floats(-3.0, 3.0), min_size=2, max_size=4),
)
def test_norm_triangle_inequality(a, c):
    n = min(len(a), len(c))
    a, c = np.asarray(a[:n]), np.asarray(c[:n])
    b = ball(W3, 2.0, n)
    lhs = norm_Xp(a + c, b).value
    rhs = norm_Xp(a, b).value + norm_Xp(c, b).value
    assert lhs <= rhs + 1e-8


@pytest.mark.parametrize("dist", [W1, W2, W3, E2])
def test_inclusion_support_bound(dist):
    # ball inside sqrt(p) B_2 + p B_infty, so the norm is below the sum of supports
    gen = stream(11, 0)
    for _ in range(25):
        n = int(gen.integers(1, 5))
        p = float(gen.uniform(1.0, 9.0))
        a = gen.standard_normal(n)
        b = ball(dist, p, n)
        val = norm_Xp(a, b).value
        cap = math.sqrt(p) * np.linalg.norm(a) + p * np.abs(a).max()
        assert val <= cap + 1e-9


@pytest.mark.parametrize("u", [2.0, 4.0, 8.0])
@pytest.mark.parametrize("dist", [W1, W2, E2])
def test_scaling_in_p(u, dist):
    gen = stream(13, 0)
    for _ in range(10):
        n = int(gen.integers(1, 4))
        p = float(gen.uniform(1.0, 6.0))
        a = gen.standard_normal(n)
        lo = norm_Xp(a, ball(dist, p, n)).value
        hi = norm_Xp(a, ball(dist, u * p, n)).value
        assert lo <= hi + 1e-10  # monotone in p
        assert hi <= u * lo + 1e-8  # doubling-type scaling


@pytest.mark.parametrize("dist", [W2, W3])
def test_duality_gap_convex_case(dist):
    # the relaxation is tight when the ball is convex, i.e. N'(1) >= 2
    gen = stream(17, 0)
    for _ in range(15):
        n = int(gen.integers(1, 4))
        p = float(gen.uniform(1.0, 8.0))
        a = gen.standard_normal(n)
        primal = norm_Xp(a, ball(dist, p, n)).value
        dual = float(norm_Xp_dual(a, ball(dist, p, n)))
        assert dual >= primal - 1e-9
        assert dual - primal <= 1e-7 * max(1.0, primal)


def test_dual_upper_bounds_nonconvex_case():
    b = ball(W1, 2.0, 2)
    a = np.array([1.0, 1.0])
    assert float(norm_Xp_dual(a, b)) >= norm_Xp(a, b).value - 1e-10


def test_dual_gap_small_near_knee():
    # exp-power r = 2 has N'(1) < 2: the ball dents slightly at the knee,
    # leaving a small but genuine relaxation gap
    assert float(E2.tail_N_prime(1.0)) < 2.0
    gen = stream(29, 0)
    for _ in range(8):
        n = int(gen.integers(1, 4))
        p = float(gen.uniform(1.0, 8.0))
        a = gen.standard_normal(n)
        primal = norm_Xp(a, ball(E2, p, n)).value
        dual = float(norm_Xp_dual(a, ball(E2, p, n)))
        assert dual >= primal - 1e-9
        assert dual - primal <= 5e-2 * max(1.0, primal)


@pytest.mark.parametrize("dist,p", [(W1, 2.0), (W1, 4.0), (W2, 3.0), (W3, 2.0)])
def test_norm_matches_brute(dist, p):
    gen = stream(19, 0)
    for _ in range(5):
        n = int(gen.integers(2, 4))
        a = gen.standard_normal(n)
        b = ball(dist, p, n)
        exact = norm_Xp(a, b).value
        brute = brute_norm_Xp(a, b)
        assert exact >= brute - 1e-9  # brute is a feasible-point lower bound
        assert abs(exact - brute) <= 1e-3 * max(1.0, abs(exact))


def test_heterogeneous_ball_mixed_tails():
    b = DualBall(2.0, (W1, W2))
    a = np.array([1.0, 1.0])
    val = norm_Xp(a, b).value
    brute = brute_norm_Xp(a, b, resolution=5e-3)
    assert val >= brute - 1e-9
    assert abs(val - brute) <= 2e-3 * max(1.0, val)


def test_bilinear_identity_matrix():
    # sup x^T I y over the p = 2 and p = 4 gaussian-tail balls
    b2 = ball(W2, 2.0, 2)
    res = norm_XYp(np.eye(2), b2, b2)
    assert res.value == pytest.approx(2.0, rel=1e-8)
    b4 = ball(W2, 4.0, 2)
    assert norm_XYp(np.eye(2), b4, b4).value == pytest.approx(4.0, rel=1e-8)


def test_bilinear_rank_one_factorizes():
    u = np.array([1.0, -2.0, 0.5])
    v = np.array([0.3, 1.2])
    A2 = np.outer(u, v)
    bx = ball(W2, 3.0, 3)
    by = ball(W2, 3.0, 2)
    res = norm_XYp(A2, bx, by)
    expect = norm_Xp(u, bx).value * norm_Xp(v, by).value
    assert res.value == pytest.approx(expect, rel=1e-7)


@pytest.mark.parametrize("dist,p", [(W1, 2.0), (W2, 4.0), (W3, 2.0)])
def test_bilinear_matches_brute(dist, p):
    gen = stream(23, 0)
    for _ in range(3):
        A2 = gen.standard_normal((2, 2))
        bx = ball(dist, p, 2)
        by = ball(dist, p, 2)
        val = norm_XYp(A2, bx, by).value
        brute = brute_norm_XYp(A2, bx, by)
        assert val >= brute - 1e-9
        assert abs(val - brute) <= 1e-3 * max(1.0, val)


def test_zero_vector_norm_zero():
    b = ball(W2, 2.0, 3)
    assert norm_Xp(np.zeros(3), b).value == 0.0


def test_invalid_ball_rejected():
    with pytest.raises(ConfigurationError):
        ball(W2, 0.5, 2)
    with pytest.raises(ConfigurationError):
        DualBall(2.0, ())
