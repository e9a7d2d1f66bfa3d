import math

import numpy as np
import pytest

from chaosmoments.bounds import (
    HILBERT,
    KINDS,
    LOWER,
    TWO_SIDED,
    UPPER_GENERAL,
    UPPER_SUBGAUSSIAN,
    assemble_bound,
    subgaussian_gamma,
    term_T1_chaos_mean,
    term_T2_supx,
    term_T3_supy,
    term_T4_sup_f_column,
    term_T5_sup_f_xyp,
    term_T6_operator,
)
from chaosmoments.distributions import EXP_POWER, GAUSSIAN, WEIBULL, make_distribution
from chaosmoments.dual_norms import ConfigurationError, ball
from chaosmoments.functionals import CoefficientTensor
from chaosmoments.rng import stream

W1 = make_distribution(WEIBULL, 1.0)
W2 = make_distribution(WEIBULL, 2.0)
G = make_distribution(GAUSSIAN)

SCALAR = CoefficientTensor(np.ones((1, 1, 1)))


def test_scalar_terms_closed_form():
    # linear tails, p = 4: the whole budget buys a coordinate value of 4
    bx = ball(W1, 4.0, 1)
    by = ball(W1, 4.0, 1)
    assert term_T1_chaos_mean(SCALAR) == 1.0
    assert term_T2_supx(SCALAR, bx).value == pytest.approx(4.0, rel=1e-9)
    assert term_T3_supy(SCALAR, by).value == pytest.approx(4.0, rel=1e-9)
    assert term_T4_sup_f_column(SCALAR, bx, "rows").value == pytest.approx(4.0, rel=1e-9)
    assert term_T5_sup_f_xyp(SCALAR, bx, by).value == pytest.approx(16.0, rel=1e-9)
    assert term_T6_operator(SCALAR, 4.0) == pytest.approx(4.0, rel=1e-12)


def test_scalar_two_sided_assembly():
    rep = assemble_bound(SCALAR, TWO_SIDED, 4.0, W1, W1)
    assert set(rep.terms) == {"T1", "T2", "T3", "T4r", "T5"}
    assert rep.terms["T1"] == pytest.approx(1.0)
    assert rep.terms["T5"] == pytest.approx(16.0, rel=1e-9)
    assert rep.total == pytest.approx(29.0, rel=1e-9)


def test_lower_below_upper_general():
    gen = stream(53, 0)
    for q in (1.0, 2.0, 3.0):
        A = CoefficientTensor(gen.standard_normal((3, 2, 2)), q=q)
        lo = assemble_bound(A, LOWER, 3.0, W2, W2, restarts=6)
        hi = assemble_bound(A, UPPER_GENERAL, 3.0, W2, W2, restarts=6)
        assert lo.total <= hi.total + 1e-9


def test_upper_general_term_superset():
    rep = assemble_bound(SCALAR, UPPER_GENERAL, 2.0, W1, W1)
    assert set(rep.terms) == {"T1", "T2", "T3", "T4r", "T4c", "T5", "T6"}


def test_subgaussian_assembly_scales_T1_by_gamma():
    rep = assemble_bound(SCALAR, UPPER_SUBGAUSSIAN, 2.0, G, G)
    assert rep.gamma == pytest.approx(0.5, abs=1e-3)
    assert rep.terms["T1"] == pytest.approx(rep.gamma * 1.0)


def test_subgaussian_rejects_heavy_tail():
    with pytest.raises(ConfigurationError):
        assemble_bound(SCALAR, UPPER_SUBGAUSSIAN, 2.0, G, W1)


def test_hilbert_requires_q_two_but_not_subgaussian():
    A = CoefficientTensor(np.ones((1, 1, 1)), q=3.0)
    with pytest.raises(ConfigurationError):
        assemble_bound(A, HILBERT, 2.0, W1, W1)
    rep = assemble_bound(SCALAR, HILBERT, 2.0, W1, W1)  # r = 1 is allowed
    assert rep.total > 0.0


def test_unknown_kind_rejected():
    with pytest.raises(ConfigurationError):
        assemble_bound(SCALAR, "sharpest", 2.0, W1, W1)
    assert len(KINDS) == 5


def test_terms_permutation_invariant():
    gen = stream(59, 0)
    A = CoefficientTensor(gen.standard_normal((3, 3, 2)), q=2.0)
    perm = [2, 0, 1]
    B = CoefficientTensor(A.entries[perm][:, perm, :], q=2.0)
    ra = assemble_bound(A, UPPER_GENERAL, 3.0, W2, W2, restarts=8)
    rb = assemble_bound(B, UPPER_GENERAL, 3.0, W2, W2, restarts=8)
    for name in ra.terms:
        assert ra.terms[name] == pytest.approx(rb.terms[name], rel=1e-6)


def test_restarts_monotone_ascent():
    gen = stream(61, 0)
    A = CoefficientTensor(gen.standard_normal((4, 3, 2)), q=2.0)
    bx = ball(W2, 3.0, 4)
    few = term_T2_supx(A, bx, restarts=1).value
    many = term_T2_supx(A, bx, restarts=16).value
    assert many >= few - 1e-12


@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_T6_matches_singular_values_at_q2(q):
    gen = stream(67, 0)
    A = CoefficientTensor(gen.standard_normal((3, 4, 3)), q=q)
    val = term_T6_operator(A, 2.0)
    if q == 2.0:
        svd = 2.0 * max(np.linalg.svd(S, compute_uv=False)[0] for S in A.entries)
        assert val == pytest.approx(svd, rel=1e-8)
    else:
        assert val > 0.0


def test_gamma_gaussian_tail_is_half():
    assert subgaussian_gamma(G) == pytest.approx(0.5, abs=1e-3)


def test_gamma_heavy_tail_infinite():
    assert subgaussian_gamma(W1) == math.inf
    assert subgaussian_gamma(make_distribution(EXP_POWER, 1.5)) == math.inf


def test_gamma_stable_under_grid_refinement():
    grid = np.geomspace(0.1, 50.0, 40)
    fine = np.geomspace(0.1, 50.0, 80)
    for d in (G, make_distribution(WEIBULL, 3.0)):
        a = subgaussian_gamma(d, grid)
        b = subgaussian_gamma(d, fine)
        assert a == pytest.approx(b, rel=1e-4)


def test_diagnostics_report_convergence():
    rep = assemble_bound(SCALAR, TWO_SIDED, 2.0, W2, W2)
    for name in ("T2", "T3", "T4r", "T5"):
        assert rep.diagnostics[name]["converged"]
