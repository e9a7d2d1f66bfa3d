import math

import numpy as np
import pytest

from chaosmoments.distributions import GAUSSIAN, WEIBULL, make_distribution
from chaosmoments.estimates import McConfig, batched_mean, power_mean_transform
from chaosmoments.functionals import CoefficientTensor
from chaosmoments.montecarlo import (
    estimate_E_norm_fixed_x,
    estimate_moment_decoupled,
    estimate_moment_undecoupled,
    gk_moment,
)

W1 = make_distribution(WEIBULL, 1.0)
G = make_distribution(GAUSSIAN)

CFG = McConfig(total_samples=200_000, batches=32, master_seed=3, unit_variance=True)


def test_config_validation():
    with pytest.raises(ValueError):
        McConfig(total_samples=100, batches=7)
    with pytest.raises(ValueError):
        McConfig(total_samples=100, batches=32)  # not divisible
    assert McConfig(total_samples=320, batches=32).batch_size == 10


def test_power_mean_transform():
    value, se = power_mean_transform(2.0)(4.0, 0.4)
    assert value == 2.0
    assert se == pytest.approx(0.4 * 0.5 / 2.0)
    assert power_mean_transform(3.0)(0.0, 1.0) == (0.0, 0.0)


def test_batched_mean_deterministic():
    cfg = McConfig(total_samples=8_000, batches=8, master_seed=9)
    fn = lambda gen, size: gen.standard_normal(size) ** 2
    a = batched_mean(cfg, fn)
    b = batched_mean(cfg, fn)
    assert a.value == b.value and a.stderr == b.stderr
    assert a.value == pytest.approx(1.0, abs=5.0 * a.stderr + 1e-2)


def test_decoupled_unit_tensor_second_moment():
    # unit variance on both sides: E (X Y)^2 = 1
    A = CoefficientTensor(np.ones((1, 1, 1)))
    est = estimate_moment_decoupled(A, G, G, 2.0, CFG)
    assert est.value == pytest.approx(1.0, abs=0.02)


def test_decoupled_antidiagonal_oracle():
    # |x1 y2 + x2 y1| with unit-variance factors: second moment is 2
    entries = np.zeros((2, 2, 1))
    entries[0, 1, 0] = 1.0
    entries[1, 0, 0] = 1.0
    A = CoefficientTensor(entries)
    est = estimate_moment_decoupled(A, G, G, 2.0, CFG)
    assert est.value == pytest.approx(math.sqrt(2.0), abs=0.02)


def test_gk_heavy_tail_fourth_moment():
    # normalized two-sided exponential: E X^4 / (E X^2)^2 = 24 / 4
    est = gk_moment(np.ones(1), W1, 4.0, CFG)
    assert est.value == pytest.approx(6.0 ** 0.25, abs=0.02)


def test_gk_gaussian_tail_fourth_moment():
    # survival e^{-t^2} means X^2 ~ Exp(1): E X^4 = 2 with E X^2 = 1
    cfg = McConfig(total_samples=200_000, batches=32, master_seed=3)
    est = gk_moment(np.ones(1), G, 4.0, cfg)
    assert est.value == pytest.approx(2.0 ** 0.25, abs=0.02)


def test_undecoupled_antidiagonal():
    A2 = np.array([[0.0, 1.0], [1.0, 0.0]])
    est = estimate_moment_undecoupled(A2, G, 2.0, CFG)
    assert est.value == pytest.approx(2.0, abs=0.05)


def test_undecoupled_shape_rejections():
    with pytest.raises(ValueError):
        estimate_moment_undecoupled(np.ones((2, 3)), G, 2.0, CFG)
    with pytest.raises(ValueError):
        estimate_moment_undecoupled(np.array([[0.0, 1.0], [2.0, 0.0]]), G, 2.0, CFG)
    with pytest.raises(ValueError):
        estimate_moment_undecoupled(np.eye(2), G, 2.0, CFG)


def test_fixed_x_expected_norm():
    # E |X| for survival e^{-t^2} is the integral of the survival: sqrt(pi)/2
    A = CoefficientTensor(np.ones((1, 1, 1)))
    est = estimate_E_norm_fixed_x(A, np.ones(1), G, CFG)
    assert est.value == pytest.approx(math.sqrt(math.pi) / 2.0, abs=0.01)


def test_moment_monotone_in_p_shared_seed():
    A = CoefficientTensor(np.ones((2, 2, 1)))
    values = [
        estimate_moment_decoupled(A, W1, W1, p, CFG).value for p in (1.0, 2.0, 4.0)
    ]
    assert values == sorted(values)


def test_reliability_flag_for_large_p():
    cfg = McConfig(total_samples=1_000, batches=10, master_seed=1)
    est = gk_moment(np.ones(2), W1, 6.0, cfg)  # ln(1000)/2 ~ 3.45
    assert est.warning is not None
    est2 = gk_moment(np.ones(2), W1, 2.0, cfg)
    assert est2.warning is None


def test_zero_tensor_estimates_zero():
    A = CoefficientTensor(np.zeros((2, 2, 2)) + 0.0)
    A = CoefficientTensor(np.concatenate([np.zeros((2, 2, 1)), np.zeros((2, 2, 1))], axis=2))
    est = estimate_moment_decoupled(A, G, G, 2.0, CFG)
    assert est.value == 0.0 and est.stderr == 0.0


def test_p_below_one_rejected():
    A = CoefficientTensor(np.ones((1, 1, 1)))
    with pytest.raises(ValueError):
        estimate_moment_decoupled(A, G, G, 0.5, CFG)
    with pytest.raises(ValueError):
        gk_moment(np.ones(1), G, 0.5, CFG)


def test_moment_ratio_hypercontractive():
    # fourth-to-second moment ratio stays within the comparison window
    A = CoefficientTensor(np.ones((2, 2, 1)))
    m2 = estimate_moment_decoupled(A, G, G, 2.0, CFG).value
    m4 = estimate_moment_decoupled(A, G, G, 4.0, CFG).value
    assert m2 <= m4 <= 4.0 * m2
