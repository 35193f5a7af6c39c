"""
Tests for exact Laurent polynomial arithmetic.
"""

import random
from fractions import Fraction

import pytest

from app.services.laurent import (
    LaurentPoly,
    gcd,
    normalize,
    resultant,
    substitute_power,
)
from app.utils.errors import DomainError, ParseError, ZeroDivisorError
from app.utils.parsers import parse_laurent

t = LaurentPoly.t()


def random_poly(rng: random.Random, max_span: int = 4) -> LaurentPoly:
    low = rng.randint(-3, 3)
    coeffs = [rng.randint(-5, 5) for _ in range(rng.randint(1, max_span + 1))]
    poly = LaurentPoly.from_coefficients(coeffs, low)
    return poly if not poly.is_zero else LaurentPoly.from_coefficients([1, 1], low)


def test_multiplication_expands():
    """Test (t - 2)(2t - 1) = 2t^2 - 5t + 2."""
    assert (t - 2) * (2 * t - 1) == 2 * t**2 - 5 * t + 2


def test_additive_identity():
    """Test that adding zero leaves a polynomial unchanged."""
    f = 3 * t**-1 - 7
    assert f + LaurentPoly.zero() == f


def test_exact_division():
    """Test (2t^2 - 5t + 2) / (t - 2) has quotient 2t - 1 and no remainder."""
    q, r = (2 * t**2 - 5 * t + 2).divmod(t - 2)
    assert q == 2 * t - 1
    assert r.is_zero


def test_division_identity_with_shifts():
    """Test f = q*g + r with the remainder smaller than the divisor."""
    f = 3 * t**-2 + t + 5 * t**4
    g = t**-1 - 2 * t
    q, r = f.divmod(g)
    assert q * g + r == f
    assert r.is_zero or r.span < g.span


def test_division_by_zero():
    """Test that dividing by the zero polynomial raises."""
    with pytest.raises(ZeroDivisorError, match="zero divisor"):
        (t - 2).divmod(LaurentPoly.zero())


@pytest.mark.parametrize(
    "text, expected",
    [
        ("-2*t^-1 + 5 - 2*t", "2*t^2 - 5*t + 2"),
        ("3/2*t^3", "1"),
        ("4*t^-2 - 6*t^-1", "2*t - 3"),
    ],
)
def test_normalize(text, expected):
    """Test the canonical associate on unit shifts, signs and content."""
    assert normalize(parse_laurent(text)).render() == expected


def test_normalize_zero():
    """Test that zero has no canonical associate."""
    with pytest.raises(DomainError, match="no canonical associate of zero"):
        normalize(LaurentPoly.zero())


def test_substitute_power_cases():
    """Test substitution t -> t^k on the proof example and on negative k."""
    delta = 8 * t - 9
    assert substitute_power(delta, 3) == 8 * t**3 - 9
    assert substitute_power(t - 2, -1) == t**-1 - 2
    assert normalize(substitute_power(t - 2, -1)) == 2 * t - 1
    assert substitute_power(delta, 1) == delta


def test_substitute_power_zero():
    """Test that k = 0 is rejected."""
    with pytest.raises(DomainError, match="degenerate substitution"):
        substitute_power(t - 2, 0)


def test_gcd_cases():
    """Test gcd on a shared factor, a coprime pair and a self pair."""
    assert gcd(2 * t**2 - 5 * t + 2, t - 2) == t - 2
    assert gcd(t - 2, 2 * t - 3) == LaurentPoly.one()
    f = 4 * t**-1 - 6
    assert gcd(f, f) == normalize(f)
    assert gcd(f, LaurentPoly.zero()) == normalize(f)


def test_gcd_both_zero():
    """Test that gcd(0, 0) raises."""
    with pytest.raises(DomainError):
        gcd(LaurentPoly.zero(), LaurentPoly.zero())


def test_resultant_cases():
    """Test resultants of coprime and non-coprime pairs."""
    assert abs(resultant(t - 2, t - 3)) == 1
    assert resultant(t - 2, 2 * t**2 - 5 * t + 2) == 0
    assert resultant(3 * t**2 + t - 1, LaurentPoly.one()) == 1


def test_render_and_parse():
    """Test canonical rendering of negative exponents and rationals."""
    assert (8 * t**-1 - 9).render() == "8*t^-1 - 9"
    assert (Fraction(1, 2) * t - 3).render() == "1/2*t - 3"
    assert parse_laurent("(t - 2)*(2t - 1)") == 2 * t**2 - 5 * t + 2
    assert parse_laurent("8*t^-1 - 9") == 8 * t**-1 - 9


def test_parse_error_position():
    """Test that malformed input reports a position."""
    with pytest.raises(ParseError) as info:
        parse_laurent("2*t^ + 1")
    assert info.value.position == 6


def test_ring_properties():
    """Test ring axioms, normalization and gcd/resultant consistency on random inputs."""
    rng = random.Random(20240611)
    for _ in range(500):
        f, g, h = (random_poly(rng) for _ in range(3))
        assert (f + g) * h == f * h + g * h
        assert f * g == g * f
        assert normalize(f * g) == normalize(normalize(f) * normalize(g))
        assert gcd(f * h, g * h) == normalize(normalize(h) * gcd(f, g))
        a, b = rng.choice([-2, -1, 1, 2, 3]), rng.choice([-2, 1, 2])
        assert substitute_power(substitute_power(f, a), b) == substitute_power(f, a * b)
        assert (resultant(f, g) == 0) == (gcd(f, g).span > 0)
        q, r = f.divmod(g)
        assert q * g + r == f
