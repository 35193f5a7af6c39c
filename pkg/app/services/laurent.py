"""
Exact Laurent polynomials over the rationals.

Every Alexander polynomial, primality test and resultant in the toolkit is
computed in the ring Q[t, t^-1]. Values are immutable; the heavy lifting
(division, gcd, resultants) is delegated to sympy after shifting both inputs
to ordinary polynomials with minimum exponent 0.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import gcd as int_gcd
from math import lcm as int_lcm
from typing import Iterable, Mapping, Union

from sympy import QQ, ZZ, Poly, Rational, Symbol

from app.utils.errors import DomainError, ZeroDivisorError

T = Symbol("t")

Scalar = Union[int, Fraction]


def to_fraction(value) -> Fraction:
    """Convert ints, Fractions and sympy rationals to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        num, den = value.numerator, value.denominator
        num = num() if callable(num) else num
        den = den() if callable(den) else den
        return Fraction(int(num), int(den))
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def render_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class LaurentPoly:
    """An element of Q[t, t^-1] stored as exponent -> nonzero coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | None = None):
        cleaned: dict[int, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            value = to_fraction(coeff)
            if value != 0:
                cleaned[int(exp)] = value
        self._terms = tuple(sorted(cleaned.items()))
        self._hash = None

    # Constructors

    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls()

    @classmethod
    def one(cls) -> LaurentPoly:
        return cls({0: 1})

    @classmethod
    def constant(cls, value: Scalar) -> LaurentPoly:
        return cls({0: value})

    @classmethod
    def monomial(cls, coeff: Scalar, exp: int) -> LaurentPoly:
        return cls({exp: coeff})

    @classmethod
    def t(cls) -> LaurentPoly:
        return cls({1: 1})

    @classmethod
    def from_coefficients(cls, coeffs: Iterable[Scalar], shift: int = 0):
        """Build from ascending coefficients starting at exponent ``shift``."""
        return cls({shift + i: c for i, c in enumerate(coeffs)})

    @classmethod
    def from_poly(cls, poly: Poly, shift: int = 0) -> LaurentPoly:
        """Build from a univariate sympy Poly, multiplied by t^shift."""
        terms = {}
        for (exp,), coeff in poly.terms():
            terms[exp + shift] = to_fraction(Rational(coeff))
        return cls(terms)

    # Accessors

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def min_exp(self) -> int:
        self._require_nonzero("min_exp")
        return self._terms[0][0]

    @property
    def max_exp(self) -> int:
        self._require_nonzero("max_exp")
        return self._terms[-1][0]

    @property
    def span(self) -> int:
        return self.max_exp - self.min_exp

    @property
    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self._terms[-1][1]

    @property
    def trailing_coefficient(self) -> Fraction:
        return self._terms[0][1]

    def coefficient(self, exp: int) -> Fraction:
        return dict(self._terms).get(exp, Fraction(0))

    def coefficients(self) -> list[Fraction]:
        """Dense ascending coefficients from min_exp to max_exp."""
        if self.is_zero:
            return []
        lookup = dict(self._terms)
        return [lookup.get(e, Fraction(0)) for e in range(self.min_exp, self.max_exp + 1)]

    def integer_coefficients(self) -> list[int]:
        coeffs = self.coefficients()
        if any(c.denominator != 1 for c in coeffs):
            raise DomainError(f"{self} does not have integer coefficients")
        return [c.numerator for c in coeffs]

    def _require_nonzero(self, what: str):
        if self.is_zero:
            raise DomainError(f"{what} is undefined for the zero polynomial")

    # Ring operations

    def __add__(self, other) -> LaurentPoly:
        other = _coerce(other)
        terms = dict(self._terms)
        for exp, coeff in other._terms:
            terms[exp] = terms.get(exp, Fraction(0)) + coeff
        return LaurentPoly(terms)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly({e: -c for e, c in self._terms})

    def __sub__(self, other) -> LaurentPoly:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return _coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        other = _coerce(other)
        terms: dict[int, Fraction] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                terms[e1 + e2] = terms.get(e1 + e2, Fraction(0)) + c1 * c2
        return LaurentPoly(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> LaurentPoly:
        if n < 0:
            if not self.is_monomial:
                raise DomainError("only monomials have negative powers")
            ((exp, coeff),) = self._terms
            return LaurentPoly({exp * n: coeff**n})
        result = LaurentPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by the unit t^k."""
        return LaurentPoly({e + k: c for e, c in self._terms})

    def scale(self, c: Scalar) -> LaurentPoly:
        c = to_fraction(c)
        return LaurentPoly({e: c * v for e, v in self._terms})

    def to_poly(self, domain=QQ) -> tuple[Poly, int]:
        """Return (P, a) with self = t^a * P(t) and P an ordinary polynomial."""
        if self.is_zero:
            return Poly(0, T, domain=domain), 0
        shift = self.min_exp
        coeffs = [Rational(c.numerator, c.denominator) for c in reversed(self.coefficients())]
        return Poly(coeffs, T, domain=domain), shift

    def divmod(self, other: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
        """Division with remainder after unit-shifting both sides.

        Returns (Q, R) with self = Q * other + R and R = 0 or
        span(R) < span(other).
        """
        other = _coerce(other)
        if other.is_zero:
            raise ZeroDivisorError("zero divisor")
        if self.is_zero:
            return LaurentPoly.zero(), LaurentPoly.zero()
        f, a = self.to_poly()
        g, b = other.to_poly()
        q, r = f.div(g)
        return LaurentPoly.from_poly(q, a - b), LaurentPoly.from_poly(r, a)

    def __floordiv__(self, other) -> LaurentPoly:
        return self.divmod(other)[0]

    def __mod__(self, other) -> LaurentPoly:
        return self.divmod(other)[1]

    def exact_divide(self, other) -> LaurentPoly:
        q, r = self.divmod(other)
        if not r.is_zero:
            raise DomainError(f"{other} does not divide {self}")
        return q

    def divides(self, other: LaurentPoly) -> bool:
        """True when self divides other in Q[t, t^-1]."""
        if self.is_zero:
            return other.is_zero
        return (other % self).is_zero

    def reciprocal(self) -> LaurentPoly:
        """The image under t -> t^-1."""
        return LaurentPoly({-e: c for e, c in self._terms})

    def evaluate(self, x: Scalar) -> Fraction:
        x = to_fraction(x)
        if x == 0 and any(e < 0 for e, _ in self._terms):
            raise ZeroDivisorError("zero divisor")
        return sum((c * x**e for e, c in self._terms), Fraction(0))

    def content(self) -> Fraction:
        """Positive rational c with self / c primitive in Z[t, t^-1]."""
        self._require_nonzero("content")
        den = reduce(int_lcm, (c.denominator for _, c in self._terms), 1)
        num = reduce(int_gcd, ((c * den).numerator for _, c in self._terms), 0)
        return Fraction(abs(num), den)

    # Comparison and display

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero

    def render(self) -> str:
        """Canonical text, highest exponent first: ``2*t^2 - 5*t + 2``."""
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for exp, coeff in reversed(self._terms):
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            if exp == 0:
                body = render_rational(mag)
            else:
                var = "t" if exp == 1 else f"t^{exp}"
                body = var if mag == 1 else f"{render_rational(mag)}*{var}"
            if not parts:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f"{sign} {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LaurentPoly({self.render()!r})"


def _coerce(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    return LaurentPoly.constant(to_fraction(value))


def normalize(f: LaurentPoly) -> LaurentPoly:
    """Canonical associate: min exponent 0, content 1, positive leading coefficient."""
    if f.is_zero:
        raise DomainError("no canonical associate of zero")
    if f.is_monomial:
        return LaurentPoly.one()
    scale = f.content()
    if f.leading_coefficient < 0:
        scale = -scale
    return f.shift(-f.min_exp).scale(1 / scale)


def substitute_power(f: LaurentPoly, k: int) -> LaurentPoly:
    """f(t^k) for a nonzero integer k."""
    if k == 0:
        raise DomainError("degenerate substitution")
    return LaurentPoly({k * e: c for e, c in f.terms.items()})


def reciprocal(f: LaurentPoly) -> LaurentPoly:
    return f.reciprocal()


def associated(f: LaurentPoly, g: LaurentPoly) -> bool:
    """Equality up to multiplication by a unit."""
    if f.is_zero or g.is_zero:
        return f.is_zero and g.is_zero
    return normalize(f) == normalize(g)


def gcd(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    """Normalized greatest common divisor in Q[t, t^-1]."""
    if f.is_zero and g.is_zero:
        raise DomainError("gcd of two zero polynomials is undefined")
    if g.is_zero:
        return normalize(f)
    if f.is_zero:
        return normalize(g)
    fp, _ = normalize(f).to_poly(ZZ)
    gp, _ = normalize(g).to_poly(ZZ)
    return normalize(LaurentPoly.from_poly(fp.gcd(gp)))


def coprime(f: LaurentPoly, g: LaurentPoly) -> bool:
    return gcd(f, g) == LaurentPoly.one()


def resultant(f: LaurentPoly, g: LaurentPoly) -> Fraction:
    """Resultant of the unit-shifted ordinary polynomials; zero iff gcd is nontrivial."""
    if f.is_zero or g.is_zero:
        raise DomainError("resultant of a zero polynomial is undefined")
    fp, _ = f.to_poly()
    gp, _ = g.to_poly()
    return to_fraction(Rational(fp.resultant(gp)))
