"""Pointwise transformations K(x) applied to series.

Transforms parse from a compact grammar::

    pow:2            x^2
    poly:0,-3,0,1    coefficients in ascending powers (x^3 - 3x)
    sin, exp
    ind:0.1          I(x <= 0.1)
    call:45.5        (x - 45.5)^+
    put:45.5         (45.5 - x)^+
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .farima import Series

__all__ = ["TransformKind", "Transform", "parse_transform", "apply", "apply_values", "PRESETS"]


class TransformKind(str, Enum):
    POLYNOMIAL = "poly"
    SIN = "sin"
    EXP = "exp"
    INDICATOR = "ind"
    CALL = "call"
    PUT = "put"


@dataclass(frozen=True)
class Transform:
    kind: TransformKind
    coeffs: tuple[float, ...] = ()
    threshold: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", TransformKind(self.kind))
        if self.kind is TransformKind.POLYNOMIAL:
            coeffs = tuple(float(c) for c in self.coeffs)
            if not coeffs:
                raise ValueError("polynomial transform needs at least one coefficient")
            object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def power(cls, p: int) -> "Transform":
        return cls(TransformKind.POLYNOMIAL, (0.0,) * p + (1.0,))

    def __call__(self, x):
        return apply_values(self, x)

    def scaled(self, factor: float) -> "Transform":
        """``factor * K`` (polynomials only; other kinds have no free scale)."""
        if self.kind is not TransformKind.POLYNOMIAL:
            raise ValueError("only polynomial transforms can be rescaled")
        return replace(self, coeffs=tuple(factor * c for c in self.coeffs))

    @property
    def spec_string(self) -> str:
        k = self.kind
        if k is TransformKind.POLYNOMIAL:
            nz = [i for i, c in enumerate(self.coeffs) if c != 0]
            if len(nz) == 1 and self.coeffs[nz[0]] == 1.0:
                return f"pow:{nz[0]}"
            return "poly:" + ",".join(f"{c:g}" for c in self.coeffs)
        if k in (TransformKind.SIN, TransformKind.EXP):
            return k.value
        return f"{k.value}:{self.threshold:g}"

    @property
    def label(self) -> str:
        """Human readable name used in tables, e.g. ``X^3-3X``."""
        k = self.kind
        if k is TransformKind.POLYNOMIAL:
            return _poly_label(self.coeffs)
        if k is TransformKind.SIN:
            return "sin(X)"
        if k is TransformKind.EXP:
            return "exp(X)"
        if k is TransformKind.INDICATOR:
            return f"I(X<={self.threshold:g})"
        if k is TransformKind.CALL:
            return f"(X-{self.threshold:g})+"
        return f"({self.threshold:g}-X)+"

    def __str__(self):
        return self.spec_string


def _poly_label(coeffs) -> str:
    parts = []
    for p in range(len(coeffs) - 1, -1, -1):
        c = coeffs[p]
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if p == 0 else ("X" if p == 1 else f"X^{p}")
        body = f"{mag:g}{mono}" if (mag != 1 or p == 0) else mono
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += sign + body
    return out


def parse_transform(text: str) -> Transform:
    """Parse the compact transform grammar (see module docstring)."""
    text = text.strip().replace("−", "-")
    head, _, arg = text.partition(":")
    head = head.lower()
    try:
        if head == "pow":
            p = int(arg)
            if p < 0:
                raise ValueError
            return Transform.power(p)
        if head == "poly":
            return Transform(TransformKind.POLYNOMIAL, tuple(float(c) for c in arg.split(",")))
        if head in ("sin", "exp") and not arg:
            return Transform(TransformKind(head))
        if head in ("ind", "call", "put"):
            return Transform(TransformKind(head), threshold=float(arg))
    except ValueError:
        pass
    raise ValueError(f"cannot parse transform {text!r}")


def apply_values(t: Transform, x) -> np.ndarray:
    """Evaluate K elementwise on an array."""
    x = np.asarray(x, dtype=float)
    k = t.kind
    if k is TransformKind.POLYNOMIAL:
        return np.polynomial.polynomial.polyval(x, t.coeffs)
    if k is TransformKind.SIN:
        return np.sin(x)
    if k is TransformKind.EXP:
        return np.exp(x)
    if k is TransformKind.INDICATOR:
        return (x <= t.threshold).astype(float)
    if k is TransformKind.CALL:
        return np.maximum(x - t.threshold, 0.0)
    return np.maximum(t.threshold - x, 0.0)


def apply(t: Transform, s: Series) -> Series:
    """Apply K to every value of ``s``; the transform is appended to the metadata."""
    return replace(s, values=apply_values(t, s.values), transforms=s.transforms + (t.spec_string,))


# Catalog used in the stationary simulation tables, with the power ranks the
# transforms have under a (near) standard normal marginal.
PRESETS: dict[str, tuple[Transform, int]] = {
    "X": (Transform.power(1), 1),
    "X^2": (Transform.power(2), 2),
    "X^3": (Transform.power(3), 1),
    "X^4": (Transform.power(4), 2),
    "X^3-3X": (parse_transform("poly:0,-3,0,1"), 3),
    "X^4-6X^2": (parse_transform("poly:0,0,-6,0,1"), 4),
    "sin(X)": (Transform(TransformKind.SIN), 1),
    "exp(X)": (Transform(TransformKind.EXP), 1),
    "I(X<=0.1)": (parse_transform("ind:0.1"), 1),
}
