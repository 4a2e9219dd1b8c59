"""Exact univariate polynomial algebra over the rationals.

Rationals are :class:`fractions.Fraction` (always normalized, so equality is
structural). Polynomials carry their coefficients lowest degree first.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from numbers import Rational
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "as_fraction",
    "rising_factorial",
    "RationalPolynomial",
    "FactorizedPoly",
    "expand",
    "binomial_basis_decompose",
    "binomial_basis_synthesize",
]


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are refused: silently converting 0.1 to 3602879701896397/2**55
    defeats the point of exact arithmetic.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def rising_factorial(s, k: int):
    """Pochhammer symbol ``(s)_k = s (s+1) ... (s+k-1)``.

    Exact for rational ``s``; works for floats and complex too.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if isinstance(s, (int, str)) and not isinstance(s, bool):
        s = as_fraction(s)
    out = Fraction(1) if isinstance(s, Fraction) else 1.0
    for i in range(k):
        out *= s + i
    return out


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with Fraction coefficients, ``coeffs[i]`` multiplies ``x**i``."""

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c) -> RationalPolynomial:
        return cls([c])

    @classmethod
    def linear(cls, a, b) -> RationalPolynomial:
        """``a*x + b``."""
        return cls([b, a])

    @property
    def degree(self) -> int:
        # zero polynomial gets degree -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: RationalPolynomial) -> RationalPolynomial:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPolynomial(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def __neg__(self) -> RationalPolynomial:
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other: RationalPolynomial) -> RationalPolynomial:
        return self + (-other)

    def __mul__(self, other) -> RationalPolynomial:
        if not isinstance(other, RationalPolynomial):
            c = as_fraction(other)
            return RationalPolynomial(c * a for a in self.coeffs)
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __call__(self, x):
        return self.eval(x)

    def eval(self, x) -> Fraction:
        """Exact Horner evaluation at a rational point."""
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_real(self, x):
        """Horner evaluation in floating point (real or complex ``x``)."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def compose_linear(self, a, b=0) -> RationalPolynomial:
        """Return ``p(a*x + b)``."""
        lin = RationalPolynomial.linear(a, b)
        acc = RationalPolynomial()
        for c in reversed(self.coeffs):
            acc = acc * lin + RationalPolynomial.constant(c)
        return acc

    def to_strings(self) -> list[str]:
        return [fraction_str(c) for c in self.coeffs]

    def pretty(self, var: str = "s") -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if i == 0:
                body = fraction_str(mag)
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = mono if mag == 1 else f"{fraction_str(mag)} {mono}"
            terms.append((sign, body))
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.pretty()


def fraction_str(c: Fraction) -> str:
    """Render as ``"p/q"``, or ``"p"`` when integral."""
    c = as_fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


@dataclass(frozen=True)
class FactorizedPoly:
    """Product of rising factorials ``prod (s + shift)_length``."""

    factors: tuple[tuple[Fraction, int], ...]

    def __init__(self, factors: Iterable[tuple] = ()):
        fs = []
        for shift, length in factors:
            length = int(length)
            if length < 0:
                raise ValueError("factor length must be nonnegative")
            fs.append((as_fraction(shift), length))
        object.__setattr__(self, "factors", tuple(fs))

    @property
    def degree(self) -> int:
        return sum(length for _, length in self.factors)

    def expand(self) -> RationalPolynomial:
        return expand(self)

    def eval(self, x) -> Fraction:
        x = as_fraction(x)
        out = Fraction(1)
        for shift, length in self.factors:
            out *= rising_factorial(x + shift, length)
        return out

    def eval_real(self, x):
        out = 1.0
        for shift, length in self.factors:
            out *= rising_factorial(x + float(shift), length)
        return out

    def pretty(self, var: str = "s") -> str:
        if not self.factors:
            return "1"
        parts = []
        for shift, length in self.factors:
            if shift == 0:
                inner = var
            elif shift > 0:
                inner = f"{var}+{fraction_str(shift)}"
            else:
                inner = f"{var}-{fraction_str(-shift)}"
            parts.append(f"({inner})_{length}")
        return " ".join(parts)

    def latex(self, var: str = "s") -> str:
        if not self.factors:
            return "1"
        parts = []
        for shift, length in self.factors:
            if shift.denominator == 1:
                sh = str(abs(shift.numerator))
            else:
                sh = rf"\frac{{{abs(shift.numerator)}}}{{{shift.denominator}}}"
            inner = var if shift == 0 else f"{var}{'+' if shift > 0 else '-'}{sh}"
            parts.append(rf"\left({inner}\right)_{{{length}}}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.pretty()


def expand(f: FactorizedPoly) -> RationalPolynomial:
    """Coefficient form of ``prod (s + shift)_length``."""
    acc = RationalPolynomial.constant(1)
    for shift, length in f.factors:
        for i in range(length):
            acc = acc * RationalPolynomial.linear(1, shift + i)
    return acc


def _basis_value(j: int, k: int) -> Fraction:
    # (k+1)_j / j! == binom(k+j, j)
    return Fraction(rising_factorial(k + 1, j)) / factorial(j)


def binomial_basis_decompose(q: RationalPolynomial) -> list[Fraction]:
    """Coordinates of ``q`` in the basis ``(k+1)_j / j!``, ``j = 0..deg q``.

    At the nodes ``k = -1, -2, ..., -(deg q + 1)`` the basis matrix is lower
    triangular with diagonal ``+-1``, so forward substitution solves it
    exactly. The result is rechecked at ``k = deg q + 1`` and ``deg q + 2``.
    """
    n = q.degree
    if n < 0:
        return []
    coeffs: list[Fraction] = []
    for i in range(n + 1):
        k = -1 - i
        partial = sum((c * _basis_value(j, k) for j, c in enumerate(coeffs)), Fraction(0))
        coeffs.append((q.eval(k) - partial) / _basis_value(i, k))
    for k in (n + 1, n + 2):
        lhs = sum((c * _basis_value(j, k) for j, c in enumerate(coeffs)), Fraction(0))
        if lhs != q.eval(k):
            raise ArithmeticError("binomial basis decomposition failed its recheck")
    return coeffs


def binomial_basis_synthesize(coeffs: Sequence) -> RationalPolynomial:
    """Inverse of :func:`binomial_basis_decompose`: ``sum c_j (k+1)_j / j!``."""
    acc = RationalPolynomial()
    for j, c in enumerate(coeffs):
        basis = expand(FactorizedPoly([(1, j)])) * Fraction(1, factorial(j))
        acc = acc + basis * as_fraction(c)
    return acc
