"""Parsing and normalisation of the convex-combination parameter alpha.

Alpha may arrive as a float, an int, a :class:`fractions.Fraction`, a
``(p, q)`` integer pair meaning ``p/q``, or a string (``"0.3"``, ``"1/3"``).
Exact inputs keep a ``Fraction`` alongside the float value so that the
equality cases at ``alpha = 1/k`` can be decided with integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

AlphaLike = Union[float, int, Fraction, tuple, str, "Alpha"]

# float alphas within this distance of 1/k count as 1/k (flagged inexact)
RECIPROCAL_TOL = 1e-12


@dataclass(frozen=True)
class Alpha:
    value: float
    exact: Fraction | None = None

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def is_zero(self) -> bool:
        return self.exact == 0 if self.is_exact else self.value == 0.0

    def is_one(self) -> bool:
        return self.exact == 1 if self.is_exact else self.value == 1.0

    def reciprocal_match(self, k: int) -> tuple[bool, bool]:
        """Return ``(matches 1/k, decided exactly)``."""
        if k < 1:
            return False, True
        if self.is_exact:
            return self.exact == Fraction(1, k), True
        return abs(self.value - 1.0 / k) <= RECIPROCAL_TOL, False

    def __float__(self) -> float:
        return self.value

    def __str__(self) -> str:
        if self.is_exact and self.exact.denominator != 1:
            return f"{self.exact.numerator}/{self.exact.denominator}"
        return repr(self.value)


def as_alpha(alpha: AlphaLike) -> Alpha:
    if isinstance(alpha, Alpha):
        a = alpha
    elif isinstance(alpha, Fraction):
        a = Alpha(float(alpha), alpha)
    elif isinstance(alpha, bool):
        raise TypeError("alpha must be numeric, not bool")
    elif isinstance(alpha, int):
        a = Alpha(float(alpha), Fraction(alpha))
    elif isinstance(alpha, tuple):
        if len(alpha) != 2:
            raise ValueError(f"alpha pair must be (p, q), got {alpha!r}")
        p, q = (int(x) for x in alpha)
        if q == 0:
            raise ValueError("alpha denominator is zero")
        frac = Fraction(p, q)
        a = Alpha(float(frac), frac)
    elif isinstance(alpha, str):
        a = parse_alpha(alpha)
    else:
        a = Alpha(float(alpha), None)
    if not 0.0 <= a.value <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {a}")
    return a


def parse_alpha(text: str) -> Alpha:
    """``"p/q"`` engages the exact path; decimals stay floating-point."""
    s = text.strip()
    if "/" in s:
        num, _, den = s.partition("/")
        try:
            p, q = int(num), int(den)
        except ValueError:
            raise ValueError(f"malformed rational alpha {text!r}") from None
        return as_alpha((p, q))
    try:
        value = float(s)
    except ValueError:
        raise ValueError(f"malformed alpha {text!r}") from None
    return as_alpha(value)
