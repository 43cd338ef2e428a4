import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lmtrans.special import (
    SignedLogValue,
    gauss_2f1_at_one,
    hypergeometric_partial_sum,
    log_gamma,
    signed_gamma,
)


def test_log_gamma_examples():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(math.log(math.sqrt(math.pi)), rel=1e-14)
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)


def test_log_gamma_relative_accuracy_against_mpmath():
    xs = np.concatenate([np.geomspace(1e-3, 1e3, 400), np.linspace(0.8, 2.2, 141)])
    got = log_gamma(xs)
    worst = 0.0
    for x, g in zip(xs, got):
        ref = mpmath.loggamma(mpmath.mpf(float(x)))
        if ref == 0:
            assert abs(g) < 1e-15
            continue
        worst = max(worst, float(abs((g - ref) / ref)))
    assert worst <= 1e-12


def test_log_gamma_recursion_grid():
    x = np.linspace(1e-3, 100.0, 20001)
    lhs = log_gamma(x + 1.0)
    rhs = log_gamma(x) + np.log(x)
    scale = np.maximum(np.abs(lhs), 1.0)
    assert np.max(np.abs(lhs - rhs) / scale) < 1e-12


def test_log_gamma_scalar_and_array_types():
    assert isinstance(log_gamma(3.0), float)
    assert log_gamma(np.array([1.0, 2.0])).shape == (2,)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_log_gamma_domain(bad):
    with pytest.raises(ValueError):
        log_gamma(bad)


def test_signed_gamma_negative_arguments():
    for x in (-0.3, -1.5, -2.7, 0.4):
        assert float(signed_gamma(x)) == pytest.approx(float(mpmath.gamma(x)), rel=1e-12)
    with pytest.raises(ZeroDivisionError):
        signed_gamma(-2.0)


@given(
    st.floats(-50, 50, allow_nan=False),
    st.sampled_from([-1, 0, 1]),
    st.floats(-50, 50, allow_nan=False),
    st.sampled_from([-1, 0, 1]),
)
def test_signed_log_product_rule(la, sa, lb, sb):
    p = SignedLogValue(la, sa) * SignedLogValue(lb, sb)
    assert p.sign == sa * sb
    if p.sign:
        assert p.log_magnitude == pytest.approx(la + lb)
    else:
        assert float(p) == 0.0


def test_signed_log_round_trip():
    for x in (3.5, -2.25, 0.0):
        assert float(SignedLogValue.from_float(x)) == pytest.approx(x)
    with pytest.raises(ValueError):
        SignedLogValue(0.0, 2)


def test_gauss_examples():
    assert gauss_2f1_at_one(0, 0, 1) == pytest.approx(1.0)
    assert gauss_2f1_at_one(0.5, 0.5, 2) == pytest.approx(4 / math.pi, rel=1e-13)
    # Gamma(2) Gamma(1.6) / (Gamma(2.3) Gamma(1.3)), evaluated with mpmath at 30 digits
    assert gauss_2f1_at_one(-0.3, 0.7, 2) == pytest.approx(0.8533321549048033, rel=1e-13)


def test_gauss_matches_series_oracle():
    closed = gauss_2f1_at_one(-0.3, 0.7, 2)
    assert abs(hypergeometric_partial_sum(-0.3, 0.7, 2, 1.0, 10**6) - closed) < 1e-6
    assert abs(hypergeometric_partial_sum(0.5, 0.5, 2, 1.0, 10**6) - 4 / math.pi) < 1e-6


def test_gauss_domain_errors():
    with pytest.raises(ValueError):
        gauss_2f1_at_one(1.0, 1.0, 2.0)  # c - a - b = 0
    with pytest.raises(ValueError):
        gauss_2f1_at_one(0.1, 0.1, -1.0)


def test_partial_sum_examples():
    assert hypergeometric_partial_sum(1, 1, 1, 0.5, 50) == pytest.approx(2.0, rel=1e-14)
    assert hypergeometric_partial_sum(0, 0.7, 2, 1.0, 100) == 1.0


def test_partial_sum_converges_on_random_triples():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.uniform(-0.9, 0.9)
        b = rng.uniform(-0.9, 0.9)
        c = a + b + rng.uniform(1.2, 3.0)
        closed = gauss_2f1_at_one(a, b, c)
        errs = [abs(hypergeometric_partial_sum(a, b, c, 1.0, N) - closed) for N in (10**4, 10**5, 10**6)]
        assert errs[0] >= errs[1] >= errs[2]
        assert errs[2] < 1e-6
        assert closed == pytest.approx(float(mpmath.hyp2f1(a, b, c, 1)), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.95, -0.05), st.integers(1, 30))
def test_gauss_reduction_identity(d, h):
    lhs = gauss_2f1_at_one(d, h + d, h + 1.0)
    rhs = math.exp(log_gamma(h + 1.0) + log_gamma(1 - 2 * d) - log_gamma(h + 1.0 - d) - log_gamma(1 - d))
    assert abs(lhs - rhs) < 1e-12
