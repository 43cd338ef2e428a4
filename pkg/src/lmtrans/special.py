"""Gamma-family and hypergeometric evaluations.

Only positive arguments ever reach :func:`log_gamma`.  Gamma at a negative
non-integer argument is obtained by shifting it up with ``Gamma(x+1) = x Gamma(x)``
and carrying the sign separately in a :class:`SignedLogValue`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, zeta

__all__ = [
    "SignedLogValue",
    "log_gamma",
    "signed_gamma",
    "gauss_2f1_at_one",
    "hypergeometric_partial_sum",
]

_EULER_GAMMA = 0.57721566490153286061
# Taylor coefficients of ln Gamma(1+z) = -gamma z + sum_k (-1)^k zeta(k)/k z^k
_SERIES_ORDER = 30
_LNGAMMA_1P = np.array(
    [0.0, -_EULER_GAMMA]
    + [(-1) ** k * float(zeta(k)) / k for k in range(2, _SERIES_ORDER + 1)]
)
_SERIES_RADIUS = 0.2


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign == 0`` encodes an exact zero; ``log_magnitude`` is then ignored.
    """

    log_magnitude: float
    sign: int

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign}")

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return cls(-math.inf, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue(-math.inf, 0)
        return SignedLogValue(self.log_magnitude + other.log_magnitude, self.sign * other.sign)

    def __truediv__(self, other: "SignedLogValue") -> "SignedLogValue":
        if other.sign == 0:
            raise ZeroDivisionError("division by a zero SignedLogValue")
        if self.sign == 0:
            return self
        return SignedLogValue(self.log_magnitude - other.log_magnitude, self.sign * other.sign)

    def __float__(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


def _lngamma_1p_series(z):
    # Horner on ln Gamma(1+z), |z| <= _SERIES_RADIUS
    acc = np.zeros_like(z)
    for coef in _LNGAMMA_1P[:0:-1]:
        acc = (acc + coef) * z
    return acc


def log_gamma(x):
    """Natural log of the Gamma function for positive real ``x``.

    Accepts scalars or arrays.  Near the zeros of ``ln Gamma`` at 1 and 2 a
    zeta-series is used so that the *relative* error stays around 1e-15; elsewhere
    this defers to :func:`scipy.special.gammaln`.

    Raises
    ------
    ValueError
        If any ``x <= 0``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma is defined here only for x > 0")
    out = np.array(gammaln(arr), dtype=float, ndmin=1)
    arr = np.atleast_1d(arr)
    near1 = np.abs(arr - 1.0) < _SERIES_RADIUS
    near2 = np.abs(arr - 2.0) < _SERIES_RADIUS
    if np.any(near1):
        out[near1] = _lngamma_1p_series(arr[near1] - 1.0)
    if np.any(near2):
        # ln Gamma(x) = ln(x-1) + ln Gamma(x-1); both terms share sign near 2
        z = arr[near2] - 2.0
        out[near2] = np.log1p(z) + _lngamma_1p_series(z)
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def signed_gamma(x: float) -> SignedLogValue:
    """Gamma(x) for any real ``x`` that is not a non-positive integer.

    Negative arguments are shifted up to a positive one; the reflection formula is
    never used.  At the poles a :class:`ZeroDivisionError` is raised.
    """
    if x > 0:
        return SignedLogValue(log_gamma(x), 1)
    if x == math.floor(x):
        raise ZeroDivisionError(f"Gamma has a pole at {x}")
    shift = int(math.floor(-x)) + 1
    log_denom = 0.0
    sign = 1
    for j in range(shift):
        v = x + j
        log_denom += math.log(abs(v))
        if v < 0:
            sign = -sign
    return SignedLogValue(log_gamma(x + shift) - log_denom, sign)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def gauss_2f1_at_one(a: float, b: float, c: float) -> float:
    """Gauss's closed form for 2F1(a, b; c; 1).

    Returns ``Gamma(c) Gamma(c-a-b) / (Gamma(c-a) Gamma(c-b))``.  When ``c-a`` or
    ``c-b`` is a non-positive integer the reciprocal Gamma vanishes and so does
    the result.
    """
    if _is_nonpositive_integer(c):
        raise ValueError("c must not be a non-positive integer")
    s = c - a - b
    if not s > 0:
        raise ValueError(f"2F1 at z=1 diverges unless c - a - b > 0 (got {s})")
    if _is_nonpositive_integer(c - a) or _is_nonpositive_integer(c - b):
        return 0.0
    num = signed_gamma(c) * signed_gamma(s)
    den = signed_gamma(c - a) * signed_gamma(c - b)
    return float(num / den)


def hypergeometric_partial_sum(a: float, b: float, c: float, z: float, terms: int) -> float:
    """Partial sum of the Gauss hypergeometric series.

    ``sum_{n < terms} (a)_n (b)_n / ((c)_n n!) z^n``, with the Pochhammer
    ratios built by a running product.  The sum is accumulated with
    :func:`math.fsum`.
    """
    if _is_nonpositive_integer(c):
        raise ValueError("c must not be a non-positive integer")
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    if terms < 1:
        raise ValueError("terms must be >= 1")
    k = np.arange(terms - 1, dtype=float)
    ratios = (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
    series = np.empty(terms)
    series[0] = 1.0
    np.cumprod(ratios, out=series[1:])
    return math.fsum(series)
