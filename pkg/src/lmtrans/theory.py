"""Theoretical memory class of K(X_n) from the memory of X_n and the power rank k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "Label",
    "MemoryClass",
    "classify_covariance",
    "classify_spectral",
    "classify_square_antipersistent",
    "classify_type1_square",
]

_EPS = 1e-12


class Label(str, Enum):
    LONG_MEMORY_COV = "LongMemoryCov"
    SHORT_MEMORY_COV = "ShortMemoryCov"
    LM = "LM"
    LM0 = "LM0"
    BOUNDARY_LONG = "BoundaryLong"
    OUT_OF_SCOPE = "OutOfScope"


@dataclass(frozen=True)
class MemoryClass:
    label: Label
    source_theorem: str
    value: float | None = None

    @property
    def memory(self) -> float | None:
        """The LM parameter (0 for LM0), or None if the class carries none."""
        if self.label is Label.LM:
            return self.value
        if self.label is Label.LM0:
            return 0.0
        return None

    def __str__(self):
        if self.label is Label.LM:
            return f"LM({self.value:g})"
        if self.label is Label.LM0:
            return "LM(0)"
        return self.label.value


def _lm(value, source):
    return MemoryClass(Label.LM, source, round(value, 12))


def classify_covariance(beta: float, k: int, L_const: bool = True) -> MemoryClass:
    """Covariance-sense memory of K(X_n) for coefficients ``a_i = i^{-beta} L(i)``.

    Long memory if ``k < 1/(2 beta - 1)``, short if ``k > 1/(2 beta - 1)``.  On
    the boundary the answer is long memory only when L is asymptotically
    constant; otherwise it is left unresolved.
    """
    if not 0.5 < beta < 1.0:
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if k < 1:
        raise ValueError("power rank must be >= 1")
    prod = k * (2.0 * beta - 1.0)
    if math.isclose(prod, 1.0, rel_tol=0.0, abs_tol=_EPS):
        if L_const:
            return MemoryClass(Label.LONG_MEMORY_COV, "covariance rank rule, boundary with constant L")
        return MemoryClass(Label.BOUNDARY_LONG, "covariance rank rule, boundary unresolved")
    if prod < 1.0:
        return MemoryClass(Label.LONG_MEMORY_COV, "covariance rank rule")
    return MemoryClass(Label.SHORT_MEMORY_COV, "covariance rank rule")


def classify_spectral(d: float, k: int) -> MemoryClass:
    """LM class of K(X_n) for stationary FARIMA with ``0 < d < 1/2`` and rank k.

    ``LM(0.5 - k (0.5 - d))`` when ``k (1 - 2d) < 1``; ``LM(0)`` when
    ``k (1 - 2d) > 1`` but ``(k - 1)(1 - 2d) < 1``; otherwise out of scope,
    including the boundary ``k (1 - 2d) = 1``.
    """
    if not 0.0 < d < 0.5:
        raise ValueError(f"d must lie in (0, 1/2), got {d}")
    if k < 1:
        raise ValueError("power rank must be >= 1")
    gap = 1.0 - 2.0 * d
    prod = k * gap
    if math.isclose(prod, 1.0, rel_tol=0.0, abs_tol=_EPS):
        return MemoryClass(Label.OUT_OF_SCOPE, "spectral rank rule, boundary")
    if prod < 1.0:
        return _lm(0.5 - k * (0.5 - d), "spectral rank rule")
    if (k - 1) * gap < 1.0 - _EPS:
        return MemoryClass(Label.LM0, "spectral rank rule")
    return MemoryClass(Label.OUT_OF_SCOPE, "spectral rank rule, unresolved region")


def classify_square_antipersistent(d: float) -> MemoryClass:
    """X_n^2 of an antipersistent FARIMA(0, d, 0), ``-1 < d < 0``, is LM(0)."""
    if not -1.0 < d < 0.0:
        raise ValueError(f"d must lie in (-1, 0), got {d}")
    return MemoryClass(Label.LM0, "antipersistent square")


def classify_type1_square(d: float) -> MemoryClass:
    """X_n^2 of a Type-I process with ``1/2 < d < 1`` is asymptotically LM(d)."""
    if not 0.5 < d < 1.0:
        raise ValueError(f"d must lie in (1/2, 1), got {d}")
    return _lm(d, "Type-I square")
