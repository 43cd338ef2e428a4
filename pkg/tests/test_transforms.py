import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lmtrans.farima import ProcessSpec, simulate
from lmtrans.transforms import PRESETS, Transform, TransformKind, apply, apply_values, parse_transform


def test_examples():
    x = np.array([0.0, 0.5, 3.0])
    assert np.array_equal(apply_values(parse_transform("call:0"), x), x)
    assert apply_values(parse_transform("poly:0,-3,0,1"), 2.0) == 2.0
    assert apply_values(parse_transform("ind:0.1"), 0.1) == 1.0
    assert apply_values(parse_transform("ind:0.1"), 0.1000001) == 0.0


def test_identity_polynomial():
    x = np.linspace(-3, 3, 11)
    assert np.array_equal(apply_values(Transform(TransformKind.POLYNOMIAL, (0, 1)), x), x)


@pytest.mark.parametrize(
    "text,label",
    [
        ("pow:2", "X^2"),
        ("poly:0,-3,0,1", "X^3-3X"),
        ("poly:0,0,-6,0,1", "X^4-6X^2"),
        ("sin", "sin(X)"),
        ("exp", "exp(X)"),
        ("ind:0.1", "I(X<=0.1)"),
        ("call:45.5", "(X-45.5)+"),
        ("put:45.5", "(45.5-X)+"),
    ],
)
def test_grammar_round_trip(text, label):
    t = parse_transform(text)
    assert t.label == label
    assert parse_transform(t.spec_string) == t


def test_unicode_minus_and_errors():
    assert parse_transform("poly:0,−3,0,1") == parse_transform("poly:0,-3,0,1")
    for bad in ("pow:x", "poly:", "cos", "call", "sin:1", "pow:-1"):
        with pytest.raises(ValueError):
            parse_transform(bad)


def test_payoffs_nonnegative():
    x = np.linspace(-5, 5, 101)
    assert np.all(apply_values(parse_transform("call:1.5"), x) >= 0)
    assert np.all(apply_values(parse_transform("put:1.5"), x) >= 0)


@given(arrays(np.float64, st.integers(1, 50), elements=st.floats(-5, 5)), st.randoms())
def test_pointwise(x, rnd):
    perm = list(range(len(x)))
    rnd.shuffle(perm)
    for t, _ in PRESETS.values():
        y = apply_values(t, x)
        assert np.array_equal(apply_values(t, x[perm]), y[perm])


def test_apply_records_transform():
    s = simulate(ProcessSpec(0.2), 100, seed=1)
    out = apply(parse_transform("pow:2"), s)
    assert out.transforms == ("pow:2",)
    assert np.allclose(out.values, s.values**2)


def test_scaled():
    t = parse_transform("pow:2").scaled(2.0)
    assert apply_values(t, 3.0) == 18.0
    with pytest.raises(ValueError):
        parse_transform("sin").scaled(2.0)


def test_catalog_ranks():
    ranks = {k: r for k, (_, r) in PRESETS.items()}
    assert ranks == {
        "X": 1,
        "X^2": 2,
        "X^3": 1,
        "X^4": 2,
        "X^3-3X": 3,
        "X^4-6X^2": 4,
        "sin(X)": 1,
        "exp(X)": 1,
        "I(X<=0.1)": 1,
    }
