"""Numerical checks of the closed-form identities behind the memory results.

Each ``check_*`` function returns a :class:`CheckReport`; :func:`run_all` runs the
default suite used by ``lmtrans verify``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

import numpy as np
from scipy import integrate

from .farima import (
    ProcessSpec,
    autocovariance_sequence,
    coefficient_autocovariance,
    fractional_coefficients,
    linear_coefficients,
)
from .innovations import InnovationSpec, Law, draw_stream, make_generator
from .special import gauss_2f1_at_one, hypergeometric_partial_sum, log_gamma
from .transforms import Transform, apply_values

__all__ = [
    "CheckReport",
    "elementary_symmetric",
    "elementary_symmetric_bruteforce",
    "uu_leading_covariance",
    "square_transform_cov_oracle",
    "truncated_autocovariance_tail",
    "z_variance",
    "z_covariance",
    "mc_covariance",
    "f_positivity_function",
    "check_f_positivity",
    "check_gauss_reduction",
    "check_autocovariance",
    "check_newton_identities",
    "check_square_decomposition",
    "check_var_zn_growth",
    "default_checks",
    "run_all",
    "render_table",
    "reports_to_csv",
]


@dataclass
class CheckReport:
    name: str
    parameters: dict
    computed: float
    reference: float
    tolerance: float
    mode: str = "abs"  # "abs", "rel" or "min" (computed must exceed reference)
    details: dict = field(default_factory=dict)

    @property
    def error(self) -> float:
        if self.mode == "min":
            return self.reference - self.computed
        err = abs(self.computed - self.reference)
        if self.mode == "rel":
            err /= abs(self.reference)
        return err

    @property
    def passed(self) -> bool:
        if self.mode == "min":
            return bool(self.computed > self.reference) and all(self.details.get("conditions", {}).values())
        return bool(self.error <= self.tolerance) and all(self.details.get("conditions", {}).values())


# -- elementary symmetric polynomials ---------------------------------------


def elementary_symmetric(values, k: int):
    """``[e_0, ..., e_k]`` of ``values`` via Newton's identities.

    Works on Python numbers (ints, :class:`~fractions.Fraction`) exactly, and on
    float arrays with the values rescaled by their largest magnitude first.
    """
    if isinstance(values, np.ndarray):
        c = values.astype(float)
        s = float(np.max(np.abs(c))) if c.size else 0.0
        if s == 0.0:
            return [1.0] + [0.0] * k
        c = c / s
        p = [None] + [float(np.sum(c**m)) for m in range(1, k + 1)]
        e = [1.0]
        for j in range(1, k + 1):
            e.append(sum((-1) ** (i - 1) * e[j - i] * p[i] for i in range(1, j + 1)) / j)
        return [ej * s**j for j, ej in enumerate(e)]
    vals = list(values)
    p = [None] + [sum(v**m for v in vals) for m in range(1, k + 1)]
    e = [1]
    for j in range(1, k + 1):
        acc = sum((-1) ** (i - 1) * e[j - i] * p[i] for i in range(1, j + 1))
        e.append(Fraction(acc) / j if not isinstance(acc, float) else acc / j)
    return e


def elementary_symmetric_bruteforce(values, k: int):
    """``e_k`` by summing over all k-subsets (test oracle only)."""
    total = 0
    for combo in itertools.combinations(list(values), k):
        total += math.prod(combo)
    return total


def uu_leading_covariance(a, k: int, h: int, K_k0: float) -> float:
    """Leading covariance term ``K_k0^2 * e_k(a_i a_{i+h})`` of a rank-k transform."""
    a = np.asarray(a, dtype=float)
    if not 1 <= k <= 6:
        raise ValueError("k must be in 1..6")
    if h < 0:
        raise ValueError("lag must be >= 0")
    # zero padding: only the first len(a) - h products are nonzero
    c = a[: len(a) - h] * a[h:] if h < len(a) else np.zeros(0)
    return K_k0**2 * elementary_symmetric(c, k)[k]


def square_transform_cov_oracle(a, h: int, kappa4: float) -> float:
    """Exact ``Cov(X_n^2, X_{n+h}^2)`` for a finite linear process, unit-variance noise."""
    a = np.asarray(a, dtype=float)
    h = abs(int(h))
    if h >= len(a):
        return 0.0
    c = a[: len(a) - h] * a[h:]
    return 2.0 * float(np.sum(c)) ** 2 + kappa4 * float(np.sum(c * c))


# -- autocovariance tail ----------------------------------------------------


def _gamma_ratio_asymptotic(x, a, b):
    # Gamma(x+a)/Gamma(x+b) = x^{a-b} (1 + (a-b)(a+b-1)/(2x) + O(x^-2))
    return x ** (a - b) * (1.0 + (a - b) * (a + b - 1.0) / (2.0 * x))


def truncated_autocovariance_tail(d: float, M: int, h: int) -> float:
    """``sum_{i >= M} a_i a_{i+h}`` for FARIMA(0, d, 0) by Euler--Maclaurin.

    Intended for ``M`` large (>= 1e4) where the asymptotic Gamma ratio is exact
    to double precision.
    """
    g2 = math.gamma(d) ** 2

    def f(x):
        return _gamma_ratio_asymptotic(x, d, 1.0) * _gamma_ratio_asymptotic(x + h, d, 1.0) / g2

    lo = math.log(M)
    integral, _ = integrate.quad(
        lambda u: f(math.exp(u)) * math.exp(u), lo, lo + 200.0, limit=500, epsabs=0.0, epsrel=1e-12
    )
    step = 1e-3 * M
    deriv = (f(M + step) - f(M - step)) / (2.0 * step)
    return integral + f(M) / 2.0 - deriv / 12.0


def check_autocovariance(d: float, M: int = 10**7, h_max: int = 20, tol: float = 1e-4, tail_corrected: bool = False):
    """Closed-form FARIMA(0,d,0) autocovariance against ``sum_{i<M} a_i a_{i+h}``.

    With ``tail_corrected`` the Euler--Maclaurin tail beyond ``M`` is added to
    the truncated sum; without it the comparison is against the bare sum.
    """
    a = fractional_coefficients(d, M)
    g = autocovariance_sequence(d, h_max)
    errs = []
    for h in range(h_max + 1):
        s = coefficient_autocovariance(a, h)
        if tail_corrected:
            s += truncated_autocovariance_tail(d, M, h)
        errs.append(abs(s - g[h]) / abs(g[h]))
    worst = int(np.argmax(errs))
    name = "autocovariance_closed_form" + ("_tail_corrected" if tail_corrected else "")
    return CheckReport(
        name,
        {"d": d, "M": M, "h_max": h_max},
        computed=float(errs[worst]),
        reference=0.0,
        tolerance=tol,
        mode="abs",
        details={"worst_lag": worst, "relative_errors": errs},
    )


# -- f(x) positivity --------------------------------------------------------


def f_positivity_function(x):
    """``3 G(3x) G(x) + x G(x)^2 G(2x) - 6 G(2x)^2`` with ``G`` the Gamma function."""
    x = np.asarray(x, dtype=float)
    g1 = np.exp(log_gamma(x))
    g2 = np.exp(log_gamma(2 * x))
    g3 = np.exp(log_gamma(3 * x))
    return 3 * g3 * g1 + x * g1**2 * g2 - 6 * g2**2


def check_f_positivity(grid_points: int = 10**5, eps: float = 1e-4) -> CheckReport:
    x = np.linspace(eps, 1.0 - eps, grid_points)
    f = f_positivity_function(x)
    i = int(np.argmin(f))
    at_half = float(f_positivity_function(0.5))
    half_err = abs(at_half - (2 * math.pi - 6))
    return CheckReport(
        "f_positivity",
        {"grid_points": grid_points, "eps": eps},
        computed=float(f[i]),
        reference=0.25,
        tolerance=0.0,
        mode="min",
        details={
            "argmin": float(x[i]),
            "f(0.5)": at_half,
            "f(0.5) - (2pi - 6)": half_err,
            "conditions": {"f(0.5) == 2pi - 6 to 1e-12": half_err < 1e-12},
        },
    )


# -- Gauss reduction --------------------------------------------------------


def _gauss_reduction_rhs(d: float, h: int) -> float:
    # Gamma(h+1) Gamma(1-2d) / (Gamma(h+1-d) Gamma(1-d)); all arguments positive for d < 0
    return math.exp(log_gamma(h + 1.0) + log_gamma(1 - 2 * d) - log_gamma(h + 1.0 - d) - log_gamma(1 - d))


def check_gauss_reduction(d: float, h_max: int = 20, terms: int = 10**6, tol: float = 1e-6) -> CheckReport:
    """``2F1(d, h+d; h+1; 1)`` three ways: Gauss, the reduced Gamma ratio, the series."""
    if not -1.0 < d < 0.0:
        raise ValueError("d must lie in (-1, 0)")
    closed_err, series_err = [], []
    for h in range(1, h_max + 1):
        gauss = gauss_2f1_at_one(d, h + d, h + 1.0)
        closed_err.append(abs(gauss - _gauss_reduction_rhs(d, h)))
        series_err.append(abs(hypergeometric_partial_sum(d, h + d, h + 1.0, 1.0, terms) - gauss))
    return CheckReport(
        "gauss_reduction",
        {"d": d, "h_max": h_max, "terms": terms},
        computed=max(series_err),
        reference=0.0,
        tolerance=tol,
        details={
            "max_closed_form_error": max(closed_err),
            "conditions": {"closed forms agree to 1e-12": max(closed_err) < 1e-12},
        },
    )


# -- Newton identities ------------------------------------------------------


def check_newton_identities(max_len: int = 20, max_k: int = 4, trials: int = 30, seed: int = 0) -> CheckReport:
    """Newton-identity ``e_k`` against subset enumeration, in exact rationals and floats."""
    rng = make_generator(seed)
    exact_mismatch = 0
    float_err = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, max_len + 1))
        nums = rng.integers(-9, 10, size=m)
        dens = rng.integers(1, 10, size=m)
        vals = [Fraction(int(p), int(q)) for p, q in zip(nums, dens)]
        e = elementary_symmetric(vals, max_k)
        fl = elementary_symmetric(np.array([float(v) for v in vals]), max_k)
        for k in range(1, max_k + 1):
            brute = elementary_symmetric_bruteforce(vals, k)
            if e[k] != brute:
                exact_mismatch += 1
            float_err = max(float_err, abs(fl[k] - float(brute)) / max(1.0, abs(float(brute))))
    return CheckReport(
        "newton_identities",
        {"max_len": max_len, "max_k": max_k, "trials": trials},
        computed=float(exact_mismatch),
        reference=0.0,
        tolerance=0.0,
        details={"max_float_error": float_err, "conditions": {"floats within 1e-12": float_err < 1e-12}},
    )


# -- Monte Carlo covariance -------------------------------------------------


def mc_covariance(
    t,
    model,
    h: int,
    reps: int,
    seed: int = 0,
    innovation: InnovationSpec | None = None,
    truncation: int = 64,
) -> tuple[float, float]:
    """Monte Carlo ``Cov(K(X_n), K(X_{n+h}))`` from independent pairs.

    ``model`` is either a :class:`ProcessSpec` (truncated to ``truncation``
    coefficients, its own innovation law) or a coefficient sequence used with
    ``innovation`` (default Gaussian).  Each replication draws a fresh stretch of
    innovations, so the pairs are i.i.d. and the standard error is exact.
    """
    if isinstance(model, ProcessSpec):
        a = linear_coefficients(model, truncation)
        innovation = innovation or model.innovation
    else:
        a = np.asarray(model, dtype=float)
        innovation = innovation or InnovationSpec(Law.GAUSSIAN)
    h = abs(int(h))
    L = len(a)
    width = L + h
    rng = make_generator(seed)
    rev = a[::-1]
    chunk = max(1, 2**22 // width)
    U_all, V_all = [], []
    for start in range(0, reps, chunk):
        rows = min(chunk, reps - start)
        e = draw_stream(innovation, rows * width, rng=rng).reshape(rows, width)
        x0 = e[:, :L] @ rev
        xh = e[:, h : h + L] @ rev
        U_all.append(_apply(t, x0))
        V_all.append(_apply(t, xh))
    U = np.concatenate(U_all)
    V = np.concatenate(V_all)
    if not (np.all(np.isfinite(U)) and np.all(np.isfinite(V))):
        raise ArithmeticError("non-finite transformed values; second moments unstable")
    psi = (U - U.mean()) * (V - V.mean())
    return float(psi.mean()), float(psi.std(ddof=1) / math.sqrt(reps))


def _apply(t, x):
    if isinstance(t, Transform):
        return apply_values(t, x)
    return np.asarray(t(x), dtype=float)


def check_square_decomposition(a=(1.0, 0.5), h: int = 0, draws: int = 10**7, seed: int = 0) -> CheckReport:
    """Gaussian ``X^2``: MC covariance minus the leading term equals ``2 sum a_i^2 a_{i+h}^2``."""
    a = np.asarray(a, dtype=float)
    est, se = mc_covariance(Transform.power(2), a, h, draws, seed=seed)
    uu = uu_leading_covariance(a, 2, h, 2.0)
    c = a[: len(a) - h] * a[h:] if h < len(a) else np.zeros(0)
    remainder = 2.0 * float(np.sum(c * c))
    return CheckReport(
        "square_decomposition",
        {"a": a.tolist(), "h": h, "draws": draws},
        computed=est - uu,
        reference=remainder,
        tolerance=3.0 * se,
        details={"mc_cov": est, "mc_se": se, "uu": uu, "oracle_cov": square_transform_cov_oracle(a, h, 0.0)},
    )


# -- Type-I partial sums ----------------------------------------------------


def _pair_sum(gamma, A: int, B: int) -> float:
    """``sum_{i=1}^{A} sum_{j=1}^{B} gamma(|i-j|)`` via lag counts."""
    if A <= 0 or B <= 0:
        return 0.0
    k = np.arange(-(B - 1), A)
    count = np.minimum(B, A - k) - np.maximum(1, 1 - k) + 1
    return float(np.dot(count.astype(float), gamma[np.abs(k)]))


def z_variance(gamma, n: int, tail_sum: float | None = None) -> float:
    """``Var(Z_n)``, ``Z_n = X_n + X_{n-1}``, from the increment autocovariance ``gamma``.

    With ``tail_sum`` given (``sum_{h >= n-1} gamma(h)``) the double sum is taken
    in its collapsed form, which relies on ``gamma(0) + 2 sum gamma(h) = 0``;
    otherwise it is summed directly.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return float(gamma[0])
    if tail_sum is None:
        double = _pair_sum(gamma, n - 1, n - 1)
    else:
        h = np.arange(1, n - 1, dtype=float)
        double = -2.0 * (n - 1) * tail_sum - 2.0 * float(np.dot(h, gamma[1 : n - 1]))
    return 4.0 * double + 4.0 * float(np.sum(gamma[1:n])) + float(gamma[0])


def z_covariance(gamma, n: int, h: int) -> float:
    """``Cov(Z_n, Z_{n+h})`` from the increment autocovariance (direct sums)."""
    A, B = n + h - 1, n - 1
    cross1 = float(np.sum(gamma[n + h - np.arange(1, n)])) if n > 1 else 0.0
    cross2 = float(np.sum(gamma[np.abs(n - np.arange(1, n + h))])) if n + h > 1 else 0.0
    return 4.0 * _pair_sum(gamma, A, B) + 2.0 * cross1 + 2.0 * cross2 + float(gamma[h])


def check_var_zn_growth(
    d: float, n_list=(100, 1000, 10000), h: int = 5, tail_terms: int = 10**7, min_corr: float = 0.99
) -> CheckReport:
    """``Var(Z_n)`` grows and ``Corr(Z_n, Z_{n+h}) -> 1`` for a Type-I process."""
    if not 0.5 < d < 1.0:
        raise ValueError("d must lie in (1/2, 1)")
    dy = d - 1.0
    n_list = sorted(int(n) for n in n_list)
    gamma = autocovariance_sequence(dy, tail_terms)
    # Stirling tail beyond tail_terms: gamma(h) ~ C h^{2dy-1}
    C = math.exp(log_gamma(1 - 2 * dy) - log_gamma(1 - dy)) / math.gamma(dy)
    tail_bound = abs(C) * (tail_terms + 0.5) ** (2 * dy) / (-2 * dy)
    suffix = np.cumsum(gamma[::-1])[::-1]  # suffix[k] = sum_{h >= k}^{tail_terms} gamma(h)
    variances, direct, corrs = [], [], []
    for n in n_list:
        tail = float(suffix[n - 1]) - tail_bound if n >= 2 else 0.0
        variances.append(z_variance(gamma, n, tail_sum=tail if n >= 2 else None))
        direct.append(z_variance(gamma, n))
        corrs.append(z_covariance(gamma, n, h) / math.sqrt(direct[-1] * z_variance(gamma, n + h)))
    increasing = all(b > a for a, b in zip(variances, variances[1:]))
    gaps = [1 - c for c in corrs]
    shrinking = all(b < a for a, b in zip(gaps, gaps[1:]))
    collapse_err = max(abs(v - w) / w for v, w in zip(variances, direct))
    return CheckReport(
        "var_zn_growth",
        {"d": d, "n_list": n_list, "h": h, "tail_terms": tail_terms},
        computed=corrs[-1],
        reference=min_corr,
        tolerance=0.0,
        mode="min",
        details={
            "var_collapsed": variances,
            "var_direct": direct,
            "corr": corrs,
            "tail_bound": tail_bound,
            "collapsed_vs_direct_rel": collapse_err,
            "conditions": {
                "Var(Z_n) strictly increasing": increasing,
                "1 - Corr decreasing": shrinking,
                "collapsed form matches direct sum": collapse_err < 1e-6,
            },
        },
    )


# -- suite ------------------------------------------------------------------


def default_checks(quick: bool = False) -> list:
    """Zero-argument callables for the default verification suite."""
    big_m = 10**6 if quick else 10**7
    draws = 10**6 if quick else 10**7
    checks = [partial(check_f_positivity, 10**5)]
    for d in (-0.1, -0.2, -0.3, -0.4, -0.5, -0.6, -0.7, -0.8, -0.9):
        checks.append(partial(check_gauss_reduction, d, 20))
    for d in (-0.2, -0.4):
        checks.append(partial(check_autocovariance, d, M=big_m))
    for d in (0.2, 0.4):
        checks.append(partial(check_autocovariance, d, M=big_m, tail_corrected=True))
    checks.append(partial(check_newton_identities))
    for h in (0, 1):
        checks.append(partial(check_square_decomposition, (1.0, 0.5), h, draws=draws))
    checks.append(partial(check_var_zn_growth, 0.75, (100, 1000, 10000), h=5, tail_terms=big_m))
    return checks


def _call(fn):
    return fn()


def run_all(quick: bool = False, threads: int = 1) -> list[CheckReport]:
    """Run the default suite; ``quick`` shrinks the heavy sums and Monte Carlo.

    Checks are independent and run on a process pool when ``threads > 1``;
    reports come back in suite order either way.
    """
    checks = default_checks(quick)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_call, checks))
    return [fn() for fn in checks]


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    return str(v)


def render_table(reports) -> str:
    rows = [("check", "parameters", "computed", "reference", "tolerance", "result")]
    for r in reports:
        params = " ".join(f"{k}={_fmt(v)}" for k, v in r.parameters.items())
        rows.append(
            (
                r.name,
                params,
                _fmt(r.computed),
                _fmt(r.reference),
                _fmt(r.tolerance) if r.mode != "min" else "> ref",
                "PASS" if r.passed else "FAIL",
            )
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "parameters", "computed", "reference", "tolerance", "mode", "passed"])
    for r in reports:
        params = ";".join(f"{k}={_fmt(v)}" for k, v in r.parameters.items())
        w.writerow([r.name, params, repr(r.computed), repr(r.reference), repr(r.tolerance), r.mode, r.passed])
    return buf.getvalue()
