"""Exact integer polynomials (dense, lowest degree first)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .balls import CBall, RBall


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial; coeffs[i] multiplies x**i, leading coeff nonzero."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(int(c) for c in self.coeffs)
        if not cs or cs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    def __call__(self, x):
        """Horner evaluation; exact for int/Fraction, enclosing for balls."""
        acc = _zero_like(x)
        for c in reversed(self.coeffs):
            acc = acc * x + _const_like(c, x)
        return acc

    def derivative(self) -> "IntPoly":
        if self.degree == 0:
            raise ValueError("derivative of a constant is the zero polynomial")
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs) if i >= 1))

    def __mul__(self, other: "IntPoly") -> "IntPoly":
        out = [0] * (self.degree + other.degree + 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return IntPoly(tuple(out))

    def __eq__(self, other):
        return isinstance(other, IntPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def reversed_poly(self) -> "IntPoly":
        """x**deg * p(1/x); assumes nonzero constant term."""
        if self.coeffs[0] == 0:
            raise ValueError("reversal needs a nonzero constant term")
        return IntPoly(tuple(reversed(self.coeffs)))

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(f"{c}")
            elif i == 1:
                terms.append(f"{c}*x" if abs(c) != 1 else ("x" if c > 0 else "-x"))
            else:
                terms.append(f"{c}*x^{i}" if abs(c) != 1 else (f"x^{i}" if c > 0 else f"-x^{i}"))
        return " + ".join(reversed(terms)).replace("+ -", "- ") or "0"


def _zero_like(x):
    if isinstance(x, CBall):
        return CBall.from_int(0, x.prec)
    if isinstance(x, RBall):
        return RBall.from_int(0, x.prec)
    if isinstance(x, Fraction):
        return Fraction(0)
    return 0


def _const_like(c, x):
    if isinstance(x, CBall):
        return CBall.from_int(c, x.prec)
    if isinstance(x, RBall):
        return RBall.from_int(c, x.prec)
    if isinstance(x, Fraction):
        return Fraction(c)
    return c
