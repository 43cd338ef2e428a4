import json
import math

import mpmath
import numpy as np
import pytest

from lmtrans.farima import (
    Kind,
    ProcessSpec,
    arma_psi_weights,
    autocovariance_f0d0,
    autocovariance_sequence,
    coefficient_autocovariance,
    fractional_coefficients,
    linear_coefficients,
    marginal_mean,
    read_series_csv,
    simulate,
)
from lmtrans.innovations import InnovationSpec, Law, abs_t_mean, draw_stream
from lmtrans.verification import truncated_autocovariance_tail

GAUSS = InnovationSpec(Law.GAUSSIAN)


def test_fractional_coefficient_examples():
    assert np.allclose(fractional_coefficients(0.3, 2), [1.0, 0.3])
    assert np.allclose(fractional_coefficients(0.4, 3), [1.0, 0.4, 0.28])
    assert np.all(fractional_coefficients(-0.3, 4)[1:] < 0)


def test_fractional_coefficients_match_gamma_ratio():
    d = 0.37
    a = fractional_coefficients(d, 500)
    for i in (1, 10, 499):
        ref = mpmath.gamma(i + d) / (mpmath.gamma(d) * mpmath.gamma(i + 1))
        assert a[i] == pytest.approx(float(ref), rel=1e-12)


def test_psi_weight_examples():
    assert np.allclose(arma_psi_weights([], [], 3), [1, 0, 0])
    assert np.allclose(arma_psi_weights([0.5], [], 4), [1, 0.5, 0.25, 0.125])
    assert np.allclose(arma_psi_weights([-0.4], [0.7], 3), [1, 0.3, -0.12])


def test_linear_coefficients_asymptotic_gain():
    spec = ProcessSpec(0.3, ar=(-0.4,), ma=(0.7,))
    c = linear_coefficients(spec, 20000)
    i = 19999
    gain = (1 + 0.7) / (1 + 0.4)
    assert c[i] == pytest.approx(gain * i ** (0.3 - 1) / math.gamma(0.3), rel=1e-3)


def test_spec_validation():
    with pytest.raises(ValueError):
        ProcessSpec(0.5)
    with pytest.raises(ValueError):
        ProcessSpec(-1.0)
    with pytest.raises(ValueError):
        ProcessSpec(0.4, kind=Kind.TYPE_I)
    with pytest.raises(ValueError):
        ProcessSpec(0.2, ar=(1.0,))
    with pytest.raises(ValueError):
        ProcessSpec(0.2, ar=(0.5, 0.6))
    ProcessSpec(0.75, kind=Kind.TYPE_I)


def test_autocovariance_examples():
    assert autocovariance_f0d0(1e-9, 0) == pytest.approx(1.0, abs=1e-8)
    assert autocovariance_f0d0(0.2, 1) / autocovariance_f0d0(0.2, 0) == pytest.approx(0.25, rel=1e-14)
    assert autocovariance_f0d0(-0.25, 3) < 0
    # Gamma(1.5) / Gamma(1.25)^2 and Gamma(0.2) / Gamma(0.6)^2 at 30 digits
    assert autocovariance_f0d0(-0.25, 0) == pytest.approx(1.0787052023767587, rel=1e-13)
    assert autocovariance_f0d0(0.4, 0) == pytest.approx(2.0700983252962852, rel=1e-13)
    with pytest.raises(ValueError):
        autocovariance_f0d0(0.5, 1)


def test_autocovariance_matches_gamma_closed_form():
    for d in (-0.4, -0.1, 0.2, 0.45):
        for h in (1, 7, 250):
            ref = (
                mpmath.gamma(1 - 2 * d)
                / (mpmath.gamma(1 - d) * mpmath.gamma(d))
                * mpmath.gamma(h + d)
                / mpmath.gamma(h + 1 - d)
            )
            assert autocovariance_f0d0(d, h) == pytest.approx(float(ref), rel=1e-12)


def test_lag_one_ratio_against_truncated_sum():
    a = fractional_coefficients(0.2, 10**6)
    tail1 = truncated_autocovariance_tail(0.2, 10**6, 1)
    tail0 = truncated_autocovariance_tail(0.2, 10**6, 0)
    ratio = (coefficient_autocovariance(a, 1) + tail1) / (coefficient_autocovariance(a, 0) + tail0)
    assert ratio == pytest.approx(0.25, rel=1e-8)


@pytest.mark.parametrize("d", [-0.4, -0.2])
def test_closed_form_vs_truncated_sum_antipersistent(d):
    a = fractional_coefficients(d, 10**7)
    g = autocovariance_sequence(d, 20)
    rel = [abs(coefficient_autocovariance(a, h) - g[h]) / abs(g[h]) for h in range(21)]
    assert max(rel) < 1e-4


@pytest.mark.parametrize("d", [0.2, 0.4])
def test_closed_form_vs_truncated_sum_persistent(d):
    # For d > 0 the bare sum at M = 1e7 misses a tail of order M^{2d-1}; the
    # Euler-Maclaurin tail accounts for the whole gap.
    M = 10**7
    a = fractional_coefficients(d, M)
    g = autocovariance_sequence(d, 20)
    for h in (0, 1, 5, 20):
        raw = coefficient_autocovariance(a, h)
        tail = truncated_autocovariance_tail(d, M, h)
        assert abs(raw + tail - g[h]) / g[h] < 1e-6
        assert (g[h] - raw) == pytest.approx(tail, rel=1e-4)


def test_square_sum_tail_is_cauchy():
    M = 10**6
    for d in (-0.4, -0.2, 0.1, 0.2, 0.45):
        a = fractional_coefficients(d, 2 * M)
        tail = float(np.dot(a[M:], a[M:]))
        predicted = truncated_autocovariance_tail(d, M, 0) - truncated_autocovariance_tail(d, 2 * M, 0)
        assert tail == pytest.approx(predicted, rel=1e-3)
        if d <= 0.1:
            assert tail < 1e-6


@pytest.mark.parametrize("d", [-0.25, -0.4])
def test_antipersistent_spectrum_vanishes_at_zero(d):
    H = 10**6
    g = autocovariance_sequence(d, H)
    partial = g[0] + 2 * g[1:].sum()
    assert abs(partial) < 10 * abs(g[H]) * H
    small = g[0] + 2 * g[1:1001].sum()
    assert abs(partial) < abs(small)


def test_simulate_white_noise_is_innovation_stream():
    n = 1000
    s = simulate(ProcessSpec(0.0, innovation=GAUSS), n, seed=5)
    eps = draw_stream(GAUSS.with_seed(5), n + 2 * n)
    assert np.allclose(s.values, eps[2 * n :], atol=1e-12)


def test_simulate_deterministic_and_metadata(tmp_path):
    spec = ProcessSpec(0.3, ar=(-0.3,), innovation=InnovationSpec(Law.STUDENT_T, 10.0))
    a = simulate(spec, 500, seed=9)
    b = simulate(spec, 500, seed=9)
    assert np.array_equal(a.values, b.values)
    meta = a.metadata()
    for key in ("d", "ar", "ma", "kind", "law", "nu", "standardize", "seed", "n", "M", "burn_in"):
        assert key in meta
    assert meta["M"] == 1000 and meta["n"] == 500
    path = tmp_path / "x.csv"
    sidecar = a.write_csv(path)
    assert np.array_equal(read_series_csv(path), a.values)
    assert json.loads(sidecar.read_text())["seed"] == 9
    with pytest.raises(ValueError):
        simulate(spec, 500, truncation=100)


def test_simulated_lag_one_autocorrelation():
    # ratio taken about the known mean 0: centring at the sample mean biases a
    # long-memory autocorrelation downwards (about 0.58 here)
    spec = ProcessSpec(0.4, innovation=GAUSS)
    r1 = []
    for r in range(200):
        x = simulate(spec, 2000, seed=r).values
        r1.append(np.dot(x[:-1], x[1:]) / np.dot(x, x))
    assert np.mean(r1) == pytest.approx(0.4 / 0.6, abs=0.05)


def test_simulated_products_match_truncated_filter():
    spec = ProcessSpec(0.4, innovation=GAUSS)
    n = 2000
    c = linear_coefficients(spec, 2 * n)
    p0, p1 = [], []
    for r in range(200):
        x = simulate(spec, n, seed=r).values
        p0.append(np.mean(x * x))
        p1.append(np.mean(x[:-1] * x[1:]))
    for p, h in ((p0, 0), (p1, 1)):
        se = np.std(p, ddof=1) / np.sqrt(len(p))
        assert abs(np.mean(p) - coefficient_autocovariance(c, h)) < 4 * se


def test_type1_increment_variance():
    spec = ProcessSpec(0.75, kind=Kind.TYPE_I, innovation=GAUSS)
    v = []
    for r in range(200):
        x = simulate(spec, 2000, seed=r).values
        v.append(np.var(np.diff(np.r_[0.0, x])))
    assert np.mean(v) == pytest.approx(autocovariance_f0d0(-0.25, 0), rel=0.05)


def test_type1_starts_from_zero():
    spec = ProcessSpec(0.75, kind=Kind.TYPE_I, innovation=GAUSS)
    x = simulate(spec, 300, seed=1).values
    y = simulate(ProcessSpec(-0.25, innovation=GAUSS), 300, seed=1).values
    assert np.allclose(np.diff(np.r_[0.0, x]), y, atol=1e-10)


def test_marginal_mean_abs_t():
    spec = ProcessSpec(0.2, innovation=InnovationSpec(Law.ABS_STUDENT_T, 10.0))
    M = 4000
    expected = abs_t_mean(10.0) * linear_coefficients(spec, M).sum()
    assert marginal_mean(spec, M) == pytest.approx(expected)
    x = np.concatenate([simulate(spec, 2000, seed=r).values for r in range(50)])
    assert x.mean() == pytest.approx(expected, rel=0.02)
    assert marginal_mean(ProcessSpec(0.2), M) == 0.0
