"""Numerical power rank of a transform with respect to a marginal law.

``K_inf(w) = E K(w + X)`` is estimated by Monte Carlo over a frozen sample of
``X``; derivatives at 0 come from central finite differences applied per draw
(common random numbers across the stencil) with one Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import stats

from .farima import ProcessSpec, linear_coefficients
from .innovations import draw_stream, make_generator
from .transforms import Transform, apply_values

__all__ = [
    "MarginalSampler",
    "DerivativeEstimate",
    "PowerRankResult",
    "NonFiniteTransformError",
    "k_infinity",
    "k_infinity_derivative",
    "derivative_estimate",
    "power_rank",
    "analytic_option_derivatives",
    "option_power_rank",
    "empirical_cdf_pdf",
    "gaussian_cdf_pdf",
    "default_step",
]

MAX_ORDER = 6


class NonFiniteTransformError(ArithmeticError):
    pass


@dataclass
class MarginalSampler:
    """A frozen i.i.d. sample approximating the stationary marginal of ``X_n``.

    Use the ``gaussian``, ``farima`` or ``empirical`` constructors.  The sample is
    drawn once and reused for every evaluation point, which is what makes the
    finite-difference stencils cancel most of the Monte Carlo noise.
    """

    source: str
    sample_count: int
    sigma: float = 1.0
    spec: ProcessSpec | None = None
    truncation: int = 4096
    exact_terms: int = 256
    seed: int = 0
    values: np.ndarray | None = field(default=None, repr=False)
    _draws: np.ndarray | None = field(default=None, init=False, repr=False)

    @classmethod
    def gaussian(cls, sigma=1.0, sample_count=10**6, seed=0):
        return cls("gaussian", sample_count, sigma=sigma, seed=seed)

    @classmethod
    def farima(cls, spec, sample_count=2 * 10**5, truncation=4096, exact_terms=256, seed=0):
        return cls(
            "farima", sample_count, spec=spec, truncation=truncation, exact_terms=exact_terms, seed=seed
        )

    @classmethod
    def empirical(cls, values):
        values = np.asarray(values, dtype=float)
        return cls("empirical", len(values), values=values)

    def draws(self) -> np.ndarray:
        if self._draws is None:
            self._draws = self._make_draws()
        return self._draws

    @property
    def sd(self) -> float:
        if self.source == "gaussian":
            return float(self.sigma)
        return float(np.std(self.draws()))

    def _make_draws(self):
        if self.source == "gaussian":
            return self.sigma * make_generator(self.seed).standard_normal(self.sample_count)
        if self.source == "empirical":
            return self.values
        if self.source == "farima":
            return self._farima_draws()
        raise ValueError(f"unknown marginal source {self.source!r}")

    def _farima_draws(self):
        # Leading coefficients use the true innovation law; the remaining
        # (many, small) terms are replaced by a Gaussian of equal variance.
        c = linear_coefficients(self.spec, self.truncation)
        k = min(self.exact_terms, len(c))
        head, tail = c[:k], c[k:]
        rng = make_generator(self.seed)
        inn = self.spec.innovation
        out = np.empty(self.sample_count)
        chunk = max(1, 2**22 // k)
        for start in range(0, self.sample_count, chunk):
            rows = min(chunk, self.sample_count - start)
            eps = draw_stream(inn, rows * k, rng=rng).reshape(rows, k)
            out[start : start + rows] = eps @ head
        if tail.size:
            tail_sd = math.sqrt(float(np.dot(tail, tail)))
            out += tail_sd * rng.standard_normal(self.sample_count)
        return out


@dataclass(frozen=True)
class DerivativeEstimate:
    order: int
    value: float
    std_error: float


@dataclass
class PowerRankResult:
    rank: int | None
    estimates: list[DerivativeEstimate]
    thresholds: list[float]
    marginal_sd: float
    step: float
    max_rank: int

    @property
    def label(self) -> str:
        return str(self.rank) if self.rank is not None else f"none <= {self.max_rank}"

    def __str__(self):
        return self.label


def _eval(t, x):
    # overflow is reported below as an error, not as a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(t, Transform):
            y = apply_values(t, x)
        else:
            y = np.asarray(t(x), dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteTransformError("transform produced non-finite values on the marginal sample")
    return y


def k_infinity(t, ms: MarginalSampler, w: float = 0.0) -> tuple[float, float]:
    """Monte Carlo ``E K(w + X)`` and its standard error."""
    y = _eval(t, w + ms.draws())
    return float(np.mean(y)), float(np.std(y, ddof=1) / math.sqrt(len(y)))


def _stencil(r: int):
    # central difference delta^r: nodes (r/2 - k) h, weights (-1)^k C(r, k)
    k = np.arange(r + 1)
    nodes = r / 2.0 - k
    weights = np.array([(-1) ** int(j) * math.comb(r, int(j)) for j in k], dtype=float)
    return nodes, weights


def _per_draw_difference(t, x, r, h):
    nodes, weights = _stencil(r)
    acc = np.zeros_like(x)
    for node, wt in zip(nodes, weights):
        acc += wt * _eval(t, x + node * h)
    return acc / h**r


def derivative_estimate(t, ms: MarginalSampler, r: int, step: float | None = None) -> DerivativeEstimate:
    """``K_inf^{(r)}(0)`` with a standard error from the per-draw stencil values."""
    if not 1 <= r <= MAX_ORDER:
        raise ValueError(f"derivative order must be in 1..{MAX_ORDER}")
    if step is None:
        step = default_step(ms, r)
    if not step > 0:
        raise ValueError("step must be positive")
    x = ms.draws()
    coarse = _per_draw_difference(t, x, r, step)
    fine = _per_draw_difference(t, x, r, step / 2.0)
    combined = (4.0 * fine - coarse) / 3.0
    se = float(np.std(combined, ddof=1) / math.sqrt(len(combined)))
    return DerivativeEstimate(r, float(np.mean(combined)), se)


def k_infinity_derivative(t, ms: MarginalSampler, r: int, step: float | None = None) -> float:
    """Finite-difference estimate of the r-th derivative of ``K_inf`` at 0."""
    return derivative_estimate(t, ms, r, step).value


def default_step(ms: MarginalSampler, r: int) -> float:
    return 0.5 * ms.sd / math.sqrt(r)


def power_rank(
    t,
    ms: MarginalSampler,
    max_rank: int = MAX_ORDER,
    tol: float = 1e-3,
    scale: float | None = None,
    noise_multiple: float = 5.0,
) -> PowerRankResult:
    """Smallest order whose derivative of ``K_inf`` at 0 is distinguishable from 0.

    Derivatives are compared in standardized form ``z_r = K_inf^{(r)}(0) sd^r``.
    Order ``r`` counts as nonzero when
    ``|z_r| > noise_multiple * se(z_r) + tol * scale``.  By default ``scale`` is
    the largest ``|z_r| - noise_multiple * se(z_r)``, i.e. ``tol`` is relative to
    the strongest order that stands out of the noise; pass an absolute
    ``scale`` (in units of K) to make it an absolute floor.
    """
    if not 1 <= max_rank <= MAX_ORDER:
        raise ValueError(f"max_rank must be in 1..{MAX_ORDER}")
    sd = ms.sd
    step = default_step(ms, 1)
    ests = [derivative_estimate(t, ms, r, default_step(ms, r)) for r in range(1, max_rank + 1)]
    z = np.array([e.value * sd**e.order for e in ests])
    zse = np.array([e.std_error * sd**e.order for e in ests])
    if scale is None:
        # only orders that clear their own noise floor set the relative scale
        excess = np.abs(z) - noise_multiple * zse
        scale = float(max(excess.max(), 0.0)) if z.size else 0.0
    thresholds = noise_multiple * zse + tol * scale
    rank = None
    for e, zr, thr in zip(ests, z, thresholds):
        if abs(zr) > thr:
            rank = e.order
            break
    return PowerRankResult(rank, ests, thresholds.tolist(), sd, step, max_rank)


def analytic_option_derivatives(
    C_minus_mu: float, marginal_cdf: Callable[[float], float], marginal_pdf: Callable[[float], float]
) -> tuple[float, float]:
    """First and second derivative at 0 of ``H_inf(y) = E (y + Y - (C - mu))^+``.

    These are ``1 - G(C - mu)`` and ``g(C - mu)`` for the centred marginal ``Y``
    with CDF ``G`` and density ``g``.
    """
    return 1.0 - float(marginal_cdf(C_minus_mu)), float(marginal_pdf(C_minus_mu))


def option_power_rank(
    first: float, second: float, sd: float = 1.0, tol: float = 0.01, relative: float = 1.0
) -> int | None:
    """Power rank of a call payoff from ``(1 - G, g)`` at ``C - mu``.

    Both derivatives are compared in standardized units (``g * sd``).  The first
    derivative counts as zero when it is below ``tol`` or below ``relative``
    times the standardized second derivative, i.e. when the quadratic term
    dominates.  Rank 2 needs ``g * sd > tol``; otherwise the rank is None
    (all low orders negligible).
    """
    a, b = abs(first), abs(second) * sd
    if a > tol and a >= relative * b:
        return 1
    if b > tol:
        return 2
    if a > tol:
        return 1
    return None


def empirical_cdf_pdf(values) -> tuple[Callable, Callable]:
    """Empirical CDF and Gaussian-kernel density of a sample."""
    v = np.sort(np.asarray(values, dtype=float))
    kde = stats.gaussian_kde(v)

    def cdf(x):
        return np.searchsorted(v, x, side="right") / len(v)

    def pdf(x):
        return float(kde(np.atleast_1d(x))[0])

    return cdf, pdf


def gaussian_cdf_pdf(sigma: float = 1.0):
    dist = stats.norm(scale=sigma)
    return dist.cdf, dist.pdf
