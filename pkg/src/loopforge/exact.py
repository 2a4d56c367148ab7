"""Exact rationals and sparse Laurent polynomials in one variable."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import ParseError

Q = Fraction
Scalar = Union[int, Fraction]


def as_q(value) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"not a rational: {value!r}") from exc
    raise ParseError(f"not a rational: {value!r}")


def q_str(value: Scalar) -> str:
    """Serialize a rational as "p/q" (denominator omitted when 1)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def epsilon(m: int, n: int) -> Fraction:
    """Graded pairing on monomials: 1 when m + n = 0, else 0."""
    return Fraction(1) if m + n == 0 else Fraction(0)


class LaurentPoly:
    """Sparse Laurent polynomial: degree -> nonzero Fraction."""

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None):
        clean = {}
        for k, v in (coeffs or {}).items():
            if not isinstance(k, int) or isinstance(k, bool):
                raise TypeError(f"degree must be int, got {k!r}")
            v = as_q(v)
            if v:
                clean[k] = v
        self._coeffs = clean
        self._hash = None

    @classmethod
    def monomial(cls, degree: int, coeff: Scalar = 1) -> "LaurentPoly":
        return cls({degree: coeff})

    @classmethod
    def constant(cls, coeff: Scalar) -> "LaurentPoly":
        return cls({0: coeff})

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def coeff(self, degree: int) -> Fraction:
        return self._coeffs.get(degree, Fraction(0))

    def degrees(self) -> list[int]:
        return sorted(self._coeffs)

    def __bool__(self) -> bool:
        return bool(self._coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction)):
            return self == LaurentPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._coeffs.items()))
        return self._hash

    def _coerce(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return other
        return LaurentPoly.constant(as_q(other))

    def __add__(self, other) -> "LaurentPoly":
        other = self._coerce(other)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, 0) + v
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        if isinstance(other, LaurentPoly):
            return laurent_mul(self, other)
        c = as_q(other)
        return LaurentPoly({k: c * v for k, v in self._coeffs.items()})

    __rmul__ = __mul__

    def shift(self, m: int) -> "LaurentPoly":
        """Multiply by t^m."""
        return LaurentPoly({k + m: v for k, v in self._coeffs.items()})

    def to_json(self) -> dict[str, str]:
        return {str(k): q_str(v) for k, v in sorted(self._coeffs.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> "LaurentPoly":
        try:
            return cls({int(k): as_q(v) for k, v in data.items()})
        except (TypeError, ValueError, AttributeError) as exc:
            raise ParseError(f"bad Laurent polynomial: {data!r}") from exc

    def __repr__(self) -> str:
        if not self._coeffs:
            return "LaurentPoly(0)"
        terms = " + ".join(f"({q_str(v)})t^{k}" for k, v in sorted(self._coeffs.items()))
        return f"LaurentPoly({terms})"


def laurent_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Product of two Laurent polynomials, coefficient by convolution."""
    out: dict[int, Fraction] = {}
    for i, x in a._coeffs.items():
        for j, y in b._coeffs.items():
            out[i + j] = out.get(i + j, 0) + x * y
    return LaurentPoly(out)


def laurent_sum(polys: Iterable[LaurentPoly]) -> LaurentPoly:
    total = LaurentPoly()
    for p in polys:
        total = total + p
    return total
