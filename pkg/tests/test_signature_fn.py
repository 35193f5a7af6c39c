"""
Tests for signature profiles, rho_0 and the relation search.
"""

import random
from fractions import Fraction

import pytest
from mpmath import iv, mp
from sympy import Poly, Rational, acos, expand, pi

from app.services.laurent import LaurentPoly
from app.services.seifert import (
    SeifertMatrix,
    circle_u,
    connected_sum,
    figure_eight,
    mirror,
    mirror_reverse,
    operator_q,
    signature_at,
    twist,
)
from app.services.signature_fn import (
    U,
    CertifiedReal,
    cable_pullback,
    combine,
    dickson,
    endpoints,
    half_angle_polynomial,
    levine_tristram_profile,
    negate,
    profile_table,
    rho0,
    rho0_by_bisection,
    signature_value,
    small_relation_search,
)
from app.utils.errors import DomainError

t = LaurentPoly.t()


def random_parameters(rng: random.Random, count: int) -> list[Fraction]:
    return [Fraction(rng.randint(1, 400), rng.randint(1, 100)) for _ in range(count)]


def test_dickson_and_half_angle():
    """Test C_k and the reduction of symmetric polynomials to u = t + 1/t."""
    assert dickson(2) == Poly(U**2 - 2, U)
    assert dickson(3) == Poly(U**3 - 3 * U, U)
    assert half_angle_polynomial(t**2 - t + 1) == Poly(U - 1, U)
    assert half_angle_polynomial(2 * t**2 - 3 * t + 2) == Poly(2 * U - 3, U)
    with pytest.raises(DomainError):
        half_angle_polynomial(t - 2)


@pytest.mark.parametrize("j", [1, 2, 3, 6, 20])
def test_twist_profile_has_one_jump(j):
    """Test a single jump of -2 at cos(theta) = (2j - 1)/(2j)."""
    profile = levine_tristram_profile(twist(j))
    assert len(profile.jumps) == 1
    (item,) = profile.jumps
    assert item.jump == -2
    assert item.root.lo == item.root.hi == Fraction(2 * j - 1, j)
    assert profile.value_at_minus_one == -2


@pytest.mark.parametrize("k", [1, 3, 7])
def test_ribbon_operator_profile_is_zero(k):
    """Test that Q^k has real Alexander roots and a zero profile."""
    assert levine_tristram_profile(operator_q(k)).is_zero


def test_empty_and_figure_eight_profiles():
    """Test the unknot and the figure-eight knot."""
    assert levine_tristram_profile(SeifertMatrix.empty()).is_zero
    assert levine_tristram_profile(figure_eight()).is_zero
    assert rho0(levine_tristram_profile(SeifertMatrix.empty())).symbolic == 0


def test_profile_reconstruction_matches_signature_at():
    """Test sampled signatures against the stored step function."""
    rng = random.Random(11)
    matrices = [
        twist(1),
        twist(4),
        operator_q(3),
        connected_sum(twist(1), twist(2)),
        connected_sum(twist(3), mirror(twist(1))),
    ]
    for V in matrices:
        profile = levine_tristram_profile(V)
        for s in random_parameters(rng, 10) + [None]:
            assert signature_value(profile, s) == signature_at(V, s)


@pytest.mark.parametrize("j", [1, 2, 4])
def test_twist_rho0_closed_form(j):
    """Test rho_0(T_j) = -2(1 - arccos((2j - 1)/(2j))/pi) symbolically and numerically."""
    value = rho0(levine_tristram_profile(twist(j)), dps=50)
    expected = -2 * (1 - acos(Rational(2 * j - 1, 2 * j)) / pi)
    assert expand(value.symbolic - expected) == 0
    with mp.workdps(60):
        numeric = -2 * (1 - mp.acos(mp.mpf(2 * j - 1) / (2 * j)) / mp.pi)
        assert value.contains(numeric)
        assert value.width < mp.mpf(10) ** -40


@pytest.mark.parametrize("dps", [10, 30, 80])
def test_rho0_enclosure_tracks_precision(dps):
    """Test that the enclosure holds the true value and narrows with dps."""
    value = rho0(levine_tristram_profile(twist(3)), dps=dps)
    with mp.workdps(dps + 20):
        numeric = -2 * (1 - mp.acos(mp.mpf(5) / 6) / mp.pi)
        assert value.contains(numeric)
        assert value.width < mp.mpf(10) ** -(dps - 5)


def test_twist_two_rho0_magnitude():
    """Test |rho_0(T_2)| = 2(1 - arccos(3/4)/pi), inside (0, 2)."""
    value = rho0(levine_tristram_profile(twist(2)))
    assert -2 < value.upper < 0


@pytest.mark.parametrize("V", [twist(1), twist(2), figure_eight()])
def test_rho0_two_routes_agree(V):
    """Test the arc formula against bisection integration to 1e-9."""
    exact = rho0(levine_tristram_profile(V), dps=30)
    lo, hi = endpoints(rho0_by_bisection(V))
    assert hi - lo < mp.mpf(10) ** -9
    assert abs(exact.lower - lo) < mp.mpf(10) ** -9


def test_rho0_of_knot_minus_itself():
    """Test that K # -K has vanishing rho_0."""
    V = twist(3)
    profile = levine_tristram_profile(connected_sum(V, mirror_reverse(V)))
    assert profile.is_zero
    assert rho0(profile).symbolic == 0


def test_combine_merges_roots():
    """Test coincident roots merging and distinct roots staying apart."""
    trefoil = levine_tristram_profile(twist(1))
    doubled = combine(trefoil, trefoil)
    assert [item.jump for item in doubled.jumps] == [-4]
    assert doubled.value_at_minus_one == -4
    mixed = combine(trefoil, levine_tristram_profile(twist(2)))
    assert len(mixed.jumps) == 2
    assert combine(trefoil, negate(trefoil)).is_zero
    assert (trefoil + -trefoil).is_zero


def test_rho0_is_additive():
    """Test rho_0(f + g) = rho_0(f) + rho_0(g) within the enclosures."""
    f = levine_tristram_profile(twist(2))
    g = levine_tristram_profile(twist(5))
    total = rho0(f + g, dps=40)
    assert total.overlaps(rho0(f, dps=40).interval + rho0(g, dps=40).interval)


def test_trefoil_cable_pullback():
    """Test that the (2, 1) cable of the trefoil jumps at theta = pi/6 and 5pi/6."""
    pulled = cable_pullback(levine_tristram_profile(twist(1)), 2)
    assert [item.jump for item in pulled.jumps] == [-2, 2]
    assert pulled.value_at_minus_one == 0
    assert all(item.root.minpoly == Poly(U**2 - 3, U) for item in pulled.jumps)
    rows = profile_table(pulled, digits=6)
    assert [row[2] for row in rows] == [0, -2, 0]
    assert rows[1][0] == "0.166667"


def test_cable_pullback_identity_and_errors():
    """Test p = 1 and p = 0."""
    profile = levine_tristram_profile(twist(2))
    assert cable_pullback(profile, 1) is profile
    with pytest.raises(DomainError):
        cable_pullback(profile, 0)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("j", [1, 2])
def test_cable_pullback_samples_sigma_of_power(p, j):
    """Test sigma'(w) = sigma(w^p) at random rational circle points."""
    rng = random.Random(p * 100 + j)
    profile = levine_tristram_profile(twist(j))
    pulled = cable_pullback(profile, p)
    cp = dickson(p)
    for s in random_parameters(rng, 10):
        u = circle_u(s)
        image = Fraction(str(cp.eval(Rational(u.numerator, u.denominator))))
        assert signature_value(pulled, s) == profile.level_at_u(image)


@pytest.mark.parametrize("p", [2, 3, 4, 7, 10])
def test_rho0_is_cable_invariant(p):
    """Test rho_0 of a (p, 1) cable equals rho_0 of the companion."""
    profile = levine_tristram_profile(connected_sum(twist(1), twist(2)))
    assert rho0(cable_pullback(profile, p), dps=40).overlaps(rho0(profile, dps=40))


def test_profile_table():
    """Test the arc table of the trefoil."""
    rows = profile_table(levine_tristram_profile(twist(1)))
    assert rows == [("0", "0.33333333", 0), ("0.33333333", "1", -2)]


def test_relation_search_finds_no_relation_among_twist_values():
    """Test that rho_0(T_2), rho_0(T_4), rho_0(T_6) show no small relation."""
    values = [
        CertifiedReal.from_rho(rho0(levine_tristram_profile(twist(j))), f"T_{j}")
        for j in (2, 4, 6)
    ]
    assert small_relation_search(values, 100, Fraction(1, 10**30)) is None


def test_relation_search_trivial_relations():
    """Test {v, v} and {v, 2v}."""
    v = rho0(levine_tristram_profile(twist(2)))
    same = [CertifiedReal.from_rho(v), CertifiedReal.from_rho(v)]
    assert small_relation_search(same, 10, Fraction(1, 10**30)) == (1, -1)
    double = [CertifiedReal.from_rho(v), CertifiedReal(lambda dps: 2 * v.enclosure(dps))]
    assert small_relation_search(double, 10, Fraction(1, 10**30)) == (2, -1)


def test_relation_search_limits():
    """Test the family size limit."""
    values = [CertifiedReal.fixed(iv.mpf(k)) for k in range(1, 8)]
    with pytest.raises(DomainError, match="use smaller family"):
        small_relation_search(values, 2, Fraction(1, 10**10))


def test_relation_search_coarse_precision():
    """Test that a residual of 0.05 counts as a relation at precision 1/10."""
    values = [CertifiedReal.fixed(iv.mpf(1)), CertifiedReal.fixed(iv.mpf("1.05"))]
    assert small_relation_search(values, 5, Fraction(1, 10)) == (1, -1)
    assert small_relation_search(values, 5, Fraction(1, 100)) is None


def test_relation_search_tries_every_pivot_coefficient():
    """Test a relation whose pivot coefficient is not the rounded one."""
    values = [CertifiedReal.fixed(iv.mpf(1)), CertifiedReal.fixed(iv.mpf("0.001"))]
    assert small_relation_search(values, 5, Fraction(1, 10)) == (0, 1)


def test_relation_search_zero_values_are_certified():
    """Test that all-zero values still go through interval certification."""
    zeros = [CertifiedReal.fixed(iv.mpf(0)), CertifiedReal.fixed(iv.mpf(0))]
    assert small_relation_search(zeros, 3, Fraction(1, 10)) == (1, 0)
    blurred = [CertifiedReal.fixed(iv.mpf([-1, 1])), CertifiedReal.fixed(iv.mpf([-1, 1]))]
    assert small_relation_search(blurred, 3, Fraction(1, 10)) is None
