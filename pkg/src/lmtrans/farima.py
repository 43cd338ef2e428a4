"""FARIMA(p, d, q) and Type-I processes as truncated MA(infinity) filters.

A stationary path is ``X_t = sum_{i<M} c_i eps_{t-i}`` where ``c`` is the
fractional filter ``(1-B)^{-d}`` composed with the ARMA filter ``theta(B)/phi(B)``.
The whole path is one FFT convolution of ``c`` against ``n + M`` innovations.
A Type-I path is the partial sum of a FARIMA(0, d-1, 0) path with ``X_0 = 0``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .innovations import InnovationSpec, Law, abs_t_mean, draw_stream
from .special import log_gamma

__all__ = [
    "Kind",
    "ProcessSpec",
    "Series",
    "fractional_coefficients",
    "arma_psi_weights",
    "linear_coefficients",
    "autocovariance_f0d0",
    "autocovariance_sequence",
    "coefficient_autocovariance",
    "simulate",
    "read_series_csv",
]

_ROOT_MARGIN = 1e-8


class Kind(str, Enum):
    STATIONARY = "stationary"
    TYPE_I = "type1"


@dataclass(frozen=True)
class ProcessSpec:
    d: float
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    kind: Kind = Kind.STATIONARY
    innovation: InnovationSpec = field(default_factory=InnovationSpec)

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "ar", tuple(float(v) for v in self.ar))
        object.__setattr__(self, "ma", tuple(float(v) for v in self.ma))
        if self.kind is Kind.STATIONARY and not -1.0 < self.d < 0.5:
            raise ValueError(f"stationary FARIMA needs -1 < d < 1/2, got d={self.d}")
        if self.kind is Kind.TYPE_I and not 0.5 < self.d < 1.0:
            raise ValueError(f"Type-I process needs 1/2 < d < 1, got d={self.d}")
        _check_ar_roots(self.ar)

    @property
    def filter_d(self) -> float:
        """Memory parameter of the stationary filter actually simulated."""
        return self.d - 1.0 if self.kind is Kind.TYPE_I else self.d

    @property
    def label(self) -> str:
        if self.kind is Kind.TYPE_I:
            return f"TypeI(d={self.d:g})"
        p, q = len(self.ar), len(self.ma)
        return f"FARIMA({p},{self.d:g},{q})"

    def with_seed(self, seed: int) -> "ProcessSpec":
        return replace(self, innovation=self.innovation.with_seed(seed))


def _check_ar_roots(ar):
    if not ar:
        return
    # phi(z) = 1 - phi_1 z - ... - phi_p z^p, highest power first for np.roots
    coeffs = np.r_[-np.asarray(ar)[::-1], 1.0]
    while coeffs.size > 1 and coeffs[0] == 0:
        coeffs = coeffs[1:]
    roots = np.roots(coeffs)
    if np.any(np.abs(roots) <= 1.0 + _ROOT_MARGIN):
        raise ValueError(f"AR polynomial has a root on or inside the unit circle: {roots}")


@dataclass
class Series:
    """A simulated (or transformed) path plus everything needed to regenerate it."""

    values: np.ndarray
    spec: ProcessSpec
    seed: int
    truncation: int
    burn_in: int = 0
    transforms: tuple[str, ...] = ()
    tail_variance_loss: float = 0.0

    def __len__(self):
        return len(self.values)

    def metadata(self) -> dict:
        inn = self.spec.innovation
        return {
            "d": self.spec.d,
            "ar": list(self.spec.ar),
            "ma": list(self.spec.ma),
            "kind": self.spec.kind.value,
            "law": inn.law.value,
            "nu": inn.nu,
            "standardize": inn.standardize,
            "seed": self.seed,
            "n": len(self.values),
            "M": self.truncation,
            "burn_in": self.burn_in,
            "transforms": list(self.transforms),
            "tail_variance_loss": self.tail_variance_loss,
        }

    def write_csv(self, path) -> Path:
        """Write one value per line to ``path`` and the metadata to ``path.json``."""
        path = Path(path)
        with open(path, "w") as fh:
            fh.writelines(f"{v!r}\n" for v in self.values.tolist())
        sidecar = path.with_name(path.name + ".json")
        sidecar.write_text(json.dumps(self.metadata(), indent=2, sort_keys=True) + "\n")
        return sidecar


def read_series_csv(path) -> np.ndarray:
    """Read a one-value-per-line CSV (blank lines and ``#`` comments skipped)."""
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(float(line.split(",")[0]))
    return np.asarray(vals, dtype=float)


def fractional_coefficients(d: float, M: int) -> np.ndarray:
    """MA weights of ``(1-B)^{-d}``: ``a_0 = 1``, ``a_i = a_{i-1} (i-1+d) / i``."""
    if M < 1:
        raise ValueError("M must be >= 1")
    i = np.arange(1, M, dtype=float)
    a = np.empty(M)
    a[0] = 1.0
    np.cumprod((i - 1.0 + d) / i, out=a[1:])
    return a


def arma_psi_weights(ar, ma, M: int) -> np.ndarray:
    """First ``M`` weights of ``theta(B) / phi(B)``.

    ``psi_j = theta_j + sum_{i=1}^{min(j,p)} phi_i psi_{j-i}`` with ``theta_0 = 1``.
    """
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    _check_ar_roots(tuple(ar))
    psi = np.zeros(M)
    theta = np.zeros(M)
    theta[0] = 1.0
    q = min(len(ma), M - 1)
    theta[1 : q + 1] = ma[:q]
    p = len(ar)
    for j in range(M):
        acc = theta[j]
        for i in range(1, min(j, p) + 1):
            acc += ar[i - 1] * psi[j - i]
        psi[j] = acc
    return psi


def linear_coefficients(spec: ProcessSpec, M: int) -> np.ndarray:
    """Coefficients ``c_0..c_{M-1}`` of the (stationary part of the) process."""
    a = fractional_coefficients(spec.filter_d, M)
    if not spec.ar and not spec.ma:
        return a
    psi = arma_psi_weights(spec.ar, spec.ma, M)
    return _fft_convolve(a, psi)[:M]


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def _fft_convolve(x: np.ndarray, y: np.ndarray, length: int | None = None) -> np.ndarray:
    L = _next_pow2(length or (len(x) + len(y) - 1))
    return np.fft.irfft(np.fft.rfft(x, L) * np.fft.rfft(y, L), L)


def _check_autocov_d(d):
    if not -0.5 < d < 0.5:
        raise ValueError(f"closed-form autocovariance needs -1/2 < d < 1/2, got {d}")


def autocovariance_sequence(d: float, H: int) -> np.ndarray:
    """``gamma(0..H)`` of FARIMA(0, d, 0) with unit innovation variance.

    ``gamma(0) = Gamma(1-2d) / Gamma(1-d)^2`` and
    ``gamma(h) = gamma(h-1) (h-1+d) / (h-d)``.
    """
    _check_autocov_d(d)
    g0 = math.exp(log_gamma(1.0 - 2.0 * d) - 2.0 * log_gamma(1.0 - d))
    h = np.arange(1, H + 1, dtype=float)
    out = np.empty(H + 1)
    out[0] = g0
    np.cumprod((h - 1.0 + d) / (h - d), out=out[1:])
    out[1:] *= g0
    return out


def autocovariance_f0d0(d: float, h):
    """Autocovariance of FARIMA(0, d, 0) at lag(s) ``h`` (``sigma^2 = 1``)."""
    hs = np.abs(np.asarray(h, dtype=int))
    seq = autocovariance_sequence(d, int(hs.max()) if hs.size else 0)
    out = seq[hs]
    return float(out) if np.ndim(h) == 0 else out


def coefficient_autocovariance(a: np.ndarray, h: int) -> float:
    """``sum_i a_i a_{i+h}`` over the finite coefficient vector."""
    a = np.asarray(a, dtype=float)
    h = abs(int(h))
    if h >= len(a):
        return 0.0
    return float(np.dot(a[: len(a) - h], a[h:]))


def _tail_variance_loss(spec: ProcessSpec, M: int) -> float:
    # sum_{i>=M} c_i^2 with c_i ~ (theta(1)/phi(1)) i^{d-1} / Gamma(d)
    d = spec.filter_d
    if d == 0:
        return 0.0
    gain = (1.0 + sum(spec.ma)) / (1.0 - sum(spec.ar))
    gamma_d = math.gamma(d)
    return gain**2 * M ** (2 * d - 1) / ((1 - 2 * d) * gamma_d**2)


def simulate(spec: ProcessSpec, n: int, truncation: int | None = None, seed: int | None = None) -> Series:
    """Simulate ``n`` observations of ``spec``.

    Parameters
    ----------
    spec : ProcessSpec
    n : int
        Path length.
    truncation : int, optional
        Number ``M`` of MA coefficients kept; defaults to ``2 n`` and must be
        at least ``n``.
    seed : int, optional
        Overrides ``spec.innovation.seed``.

    Returns
    -------
    Series
        For a Type-I spec the values are ``X_1..X_n`` with ``X_0 = 0``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    M = 2 * n if truncation is None else int(truncation)
    if M < n:
        raise ValueError(f"truncation M={M} must be >= n={n}")
    seed = spec.innovation.seed if seed is None else int(seed)
    eps = draw_stream(spec.innovation.with_seed(seed), n + M)
    c = linear_coefficients(spec, M)
    y = _fft_convolve(c, eps, length=n + M)[M : M + n]
    if spec.kind is Kind.TYPE_I:
        y = np.cumsum(y, dtype=np.longdouble).astype(float)
    return Series(
        values=y,
        spec=spec,
        seed=seed,
        truncation=M,
        burn_in=0,
        tail_variance_loss=_tail_variance_loss(spec, M),
    )


def marginal_mean(spec: ProcessSpec, M: int) -> float:
    """Exact mean of the truncated stationary process (nonzero only for ``|t|`` innovations)."""
    if spec.innovation.law is not Law.ABS_STUDENT_T:
        return 0.0
    inn = spec.innovation
    return abs_t_mean(inn.nu, inn.standardize) * float(np.sum(linear_coefficients(spec, M)))
