"""Periodogram and the Geweke--Porter-Hudak log-periodogram regression."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .farima import Series

__all__ = [
    "DegenerateSeriesError",
    "Periodogram",
    "MemoryEstimate",
    "periodogram",
    "default_bandwidth",
    "gph_estimate",
]


class DegenerateSeriesError(ValueError):
    """Raised when the periodogram vanishes (e.g. a transformed series of all zeros)."""


@dataclass(frozen=True)
class Periodogram:
    freqs: np.ndarray
    values: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class MemoryEstimate:
    d_hat: float
    std_error: float
    m: int
    n: int
    regressor: str = "sin"

    @property
    def frequencies_used(self) -> range:
        return range(1, self.m + 1)


def _as_values(s) -> np.ndarray:
    return np.asarray(s.values if isinstance(s, Series) else s, dtype=float)


def periodogram(s, full: bool = False) -> Periodogram:
    """Periodogram of the mean-centred series at the Fourier frequencies.

    ``I_j = |sum_t x_t exp(-i t lambda_j)|^2 / (2 pi n)`` at ``lambda_j = 2 pi j / n``
    for ``j = 1..floor(n/2)``, or for ``j = 0..n-1`` when ``full`` is set.
    """
    x = _as_values(s)
    n = len(x)
    if n < 8:
        raise ValueError(f"periodogram needs n >= 8, got {n}")
    degenerate = bool(np.ptp(x) == 0)
    x = x - x.mean()
    if full:
        dft = np.fft.fft(x)
        j = np.arange(n)
    else:
        dft = np.fft.rfft(x)[1 : n // 2 + 1]
        j = np.arange(1, n // 2 + 1)
    I = (dft.real**2 + dft.imag**2) / (2 * np.pi * n)
    if degenerate:
        I = np.zeros_like(I)
    return Periodogram(2 * np.pi * j / n, I, degenerate)


def default_bandwidth(n: int) -> int:
    """``floor(n^{4/5})``, guarded against float round-down at exact powers."""
    m = int(math.floor(n**0.8))
    if (m + 1) ** 5 <= n**4:
        m += 1
    return m


def gph_estimate(values, m: int | None = None, regressor: str = "sin") -> MemoryEstimate:
    """Log-periodogram (GPH) estimate of the memory parameter.

    Regresses ``log I_j`` on ``log(4 sin^2(lambda_j / 2))`` for ``j = 1..m`` and
    returns ``d_hat = -slope`` with the OLS standard error of the slope.
    ``regressor="log"`` uses ``2 log(lambda_j)`` instead (same sign convention).

    Raises
    ------
    DegenerateSeriesError
        If the series is constant or some ``I_j`` with ``j <= m`` is zero.
    """
    x = _as_values(values)
    n = len(x)
    if m is None:
        m = default_bandwidth(n)
    if m < 3:
        raise ValueError(f"bandwidth m must be >= 3, got {m}")
    if m > n // 2:
        raise ValueError(f"bandwidth m={m} exceeds floor(n/2)={n // 2}")
    pg = periodogram(x)
    I = pg.values[:m]
    if pg.degenerate or np.any(I <= 0):
        raise DegenerateSeriesError("periodogram vanishes at a regression frequency")
    lam = pg.freqs[:m]
    if regressor == "sin":
        reg = np.log(4.0 * np.sin(lam / 2.0) ** 2)
    elif regressor == "log":
        reg = 2.0 * np.log(lam)
    else:
        raise ValueError(f"unknown regressor {regressor!r}")
    y = np.log(I)
    xc = reg - reg.mean()
    sxx = float(np.dot(xc, xc))
    slope = float(np.dot(xc, y - y.mean())) / sxx
    resid = y - y.mean() - slope * xc
    se = math.sqrt(float(np.dot(resid, resid)) / (m - 2) / sxx)
    return MemoryEstimate(d_hat=-slope, std_error=se, m=m, n=n, regressor=regressor)
