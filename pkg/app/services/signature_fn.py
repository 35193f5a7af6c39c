"""
The Levine-Tristram signature as a step function on the circle.

A profile records the jumps of w -> sigma_w(K) along the upper half circle,
walking from w = 1 to w = -1. Roots are stored exactly through u = w + 1/w =
2cos(theta): an irreducible integer polynomial in u plus an isolating rational
interval. Numeric answers are mpmath intervals; no float decides anything.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import gcd
from typing import Callable, Iterable, Optional, Sequence

from mpmath import iv, mp
from sympy import CRootOf, Poly, Rational, Symbol, acos, chebyshevt, expand, pi

from app.config import get_settings
from app.services.laurent import LaurentPoly, normalize, to_fraction
from app.services.seifert import SeifertMatrix, alexander_polynomial, circle_u
from app.services.seifert import signature_at
from app.utils.errors import DomainError
from app.utils.global_logging import get_logger

logger = get_logger(__name__)

U = Symbol("u")

TWO = Fraction(2)


def _rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def _canonical(poly: Poly) -> Poly:
    """Primitive integer form with positive leading coefficient."""
    poly = Poly(poly, U)
    if poly.get_domain().is_Field:
        poly = poly.clear_denoms(convert=True)[1]
    poly = poly.primitive()[1]
    return -poly if poly.LC() < 0 else poly


def dickson(k: int) -> Poly:
    """C_k(u) = 2T_k(u/2), so that t^k + t^-k = C_k(t + 1/t)."""
    if k == 0:
        return Poly(2, U)
    return Poly(expand(2 * chebyshevt(k, U / 2)), U)


def half_angle_polynomial(delta: LaurentPoly) -> Poly:
    """
    D(u) with t^-n Delta(t) = D(t + 1/t) for a symmetric Delta of span 2n.
    """
    delta = normalize(delta)
    if delta.span % 2:
        raise DomainError(f"{delta} is not a symmetric polynomial")
    n = delta.span // 2
    center = delta.min_exp + n
    result = Poly(_rational(delta.coefficient(center)), U)
    for k in range(1, n + 1):
        upper, lower = delta.coefficient(center + k), delta.coefficient(center - k)
        if upper != lower:
            raise DomainError(f"{delta} is not a symmetric polynomial")
        result += dickson(k) * _rational(upper)
    return result


@dataclass(frozen=True)
class CircleRoot:
    """A real root of ``minpoly`` in (-2, 2), isolated in [lo, hi]."""

    minpoly: Poly
    lo: Fraction
    hi: Fraction

    @property
    def is_rational(self) -> bool:
        return self.lo == self.hi

    def refine(self, eps: Optional[Fraction] = None) -> CircleRoot:
        if self.is_rational:
            return self
        width = eps if eps is not None else (self.hi - self.lo) / 4
        lo, hi = self.minpoly.refine_root(
            _rational(self.lo), _rational(self.hi), eps=_rational(width)
        )
        return CircleRoot(self.minpoly, to_fraction(lo), to_fraction(hi))

    def narrowed(self, width: Fraction) -> CircleRoot:
        root = self
        while root.hi - root.lo >= width:
            root = root.refine(width / 2)
        return root

    def is_exactly(self, u: Fraction) -> bool:
        return self.minpoly.eval(_rational(u)) == 0

    def compare_u(self, u: Fraction) -> tuple[CircleRoot, int]:
        """Sign of (root - u), refining until decided."""
        root = self
        if root.is_exactly(u):
            return root, 0
        while root.lo <= u <= root.hi:
            root = root.refine()
        return root, (1 if root.lo > u else -1)

    def value(self):
        """The root as an exact sympy number."""
        if self.minpoly.degree() == 1:
            return _rational(self.lo)
        index = self.minpoly.count_roots(None, _rational(self.lo))
        return CRootOf(self.minpoly, index)

    def theta_over_pi(self, dps: int = 15):
        root = self.narrowed(Fraction(1, 10 ** (dps + 2)))
        with mp.workdps(dps + 10):
            middle = (mp.mpf(root.lo.numerator) / root.lo.denominator
                      + mp.mpf(root.hi.numerator) / root.hi.denominator) / 2
            return mp.acos(middle / 2) / mp.pi

    def __str__(self) -> str:
        return f"root of {self.minpoly.as_expr()} in [{self.lo}, {self.hi}]"


def circle_roots(delta: LaurentPoly) -> list[CircleRoot]:
    """Roots of Delta on the unit circle, as u = 2cos(theta) values in (-2, 2)."""
    if normalize(delta).span == 0:
        return []
    D = half_angle_polynomial(delta)
    roots: list[CircleRoot] = []
    for factor, _ in D.factor_list()[1]:
        roots.extend(_roots_of_factor(_canonical(factor)))
    return roots


def _roots_of_factor(h: Poly) -> list[CircleRoot]:
    if h.degree() == 1:
        c1, c0 = h.all_coeffs()
        r = Fraction(-int(c0), int(c1))
        return [CircleRoot(h, r, r)] if -2 < r < 2 else []
    return [
        CircleRoot(h, to_fraction(lo), to_fraction(hi))
        for (lo, hi), _ in h.intervals(inf=-2, sup=2)
    ]


def _compare(a: CircleRoot, b: CircleRoot) -> tuple[CircleRoot, CircleRoot, int]:
    """1 if a lies above b on the u axis, -1 below, 0 for the same root."""
    while True:
        if a.hi < b.lo:
            return a, b, -1
        if b.hi < a.lo:
            return a, b, 1
        if a.minpoly == b.minpoly:
            lo, hi = max(a.lo, b.lo), min(a.hi, b.hi)
            if a.minpoly.count_roots(_rational(lo), _rational(hi)) > 0:
                return a, b, 0
        a, b = a.refine(), b.refine()


def order_roots(roots: Iterable[CircleRoot]) -> list[CircleRoot]:
    """Distinct roots sorted by decreasing u, i.e. along the arc from w = 1 to w = -1."""
    ordered: list[CircleRoot] = []
    for root in roots:
        position = len(ordered)
        duplicate = False
        for i, existing in enumerate(ordered):
            root, existing, relation = _compare(root, existing)
            ordered[i] = existing
            if relation == 0:
                duplicate = True
                break
            if relation > 0:
                position = i
                break
        if not duplicate:
            ordered.insert(position, root)
    # Neighbours must be strictly separated for the arc samples.
    for i in range(len(ordered) - 1):
        upper, lower, _ = _compare(ordered[i], ordered[i + 1])
        ordered[i], ordered[i + 1] = upper, lower
    return ordered


@dataclass(frozen=True)
class RootJump:
    root: CircleRoot
    jump: int


@dataclass(frozen=True, eq=False)
class SignatureProfile:
    jumps: tuple[RootJump, ...] = ()
    value_at_minus_one: int = 0

    @property
    def is_zero(self) -> bool:
        return not self.jumps and self.value_at_minus_one == 0

    def level_at_u(self, u: Fraction) -> int:
        """The signature at the circle point with 2Re(w) = u."""
        u = Fraction(u)
        if u >= 2:
            return 0
        if u <= -2:
            return self.value_at_minus_one
        level = 0
        for item in self.jumps:
            _, sign = item.root.compare_u(u)
            if sign == 0:
                raise DomainError("signature undefined at Alexander root")
            if sign > 0:
                level += item.jump
        return level

    def levels(self) -> list[int]:
        """Levels on the arcs after each jump."""
        running, out = 0, []
        for item in self.jumps:
            running += item.jump
            out.append(running)
        return out

    def __add__(self, other: SignatureProfile) -> SignatureProfile:
        return combine(self, other)

    def __neg__(self) -> SignatureProfile:
        return negate(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SignatureProfile):
            return NotImplemented
        return (combine(self, negate(other))).is_zero



ArcLevel = Callable[[Optional[Fraction], Fraction], int]


def _assemble(roots: Iterable[CircleRoot], level_on_arc: ArcLevel) -> SignatureProfile:
    """
    Build a profile from candidate roots and a level oracle.

    ``level_on_arc(lower, upper)`` returns the level on the open arc with
    lower < u < upper; ``lower`` is None for the final arc ending at w = -1.
    """
    ordered = order_roots(roots)
    if not ordered:
        return SignatureProfile((), level_on_arc(None, TWO))
    jumps: list[RootJump] = []
    previous = 0
    for i, root in enumerate(ordered):
        lower = ordered[i + 1].hi if i + 1 < len(ordered) else None
        level = level_on_arc(lower, root.lo)
        if level != previous:
            jumps.append(RootJump(root, level - previous))
        previous = level
    return SignatureProfile(tuple(jumps), previous)


def parameter_between(lower: Fraction, upper: Fraction) -> Fraction:
    """A rational s > 0 with lower < u(s) < upper; u(s) decreases from 2 to -2."""
    lo, hi = Fraction(0), Fraction(1)
    while circle_u(hi) >= lower:
        hi *= 2
    while True:
        mid = (lo + hi) / 2
        u = circle_u(mid)
        if lower < u < upper:
            return mid
        if u >= upper:
            lo = mid
        else:
            hi = mid


def levine_tristram_profile(V: SeifertMatrix) -> SignatureProfile:
    """Locate the circle roots of Delta exactly and sample one rational point per arc."""

    def level_on_arc(lower: Optional[Fraction], upper: Fraction) -> int:
        if lower is None:
            return signature_at(V, None)
        return signature_at(V, parameter_between(lower, upper))

    roots = circle_roots(alexander_polynomial(V))
    profile = _assemble(roots, level_on_arc)
    logger.debug(f"Profile with {len(profile.jumps)} jumps from {len(roots)} circle roots")
    return profile


def signature_value(profile: SignatureProfile, s: Optional[Fraction]) -> int:
    """Reconstruct sigma at w = ((1 - s^2) + 2is)/(1 + s^2); None is w = -1."""
    return profile.level_at_u(circle_u(s))


def _midpoint(lower: Optional[Fraction], upper: Fraction) -> Fraction:
    return -TWO if lower is None else (lower + upper) / 2


def combine(f: SignatureProfile, g: SignatureProfile) -> SignatureProfile:
    """Profile of the connected sum: levels add, coincident roots merge."""

    def level_on_arc(lower: Optional[Fraction], upper: Fraction) -> int:
        u = _midpoint(lower, upper)
        return f.level_at_u(u) + g.level_at_u(u)

    roots = [item.root for item in f.jumps] + [item.root for item in g.jumps]
    return _assemble(roots, level_on_arc)


def negate(f: SignatureProfile) -> SignatureProfile:
    return SignatureProfile(
        tuple(RootJump(item.root, -item.jump) for item in f.jumps), -f.value_at_minus_one
    )


def cable_pullback(profile: SignatureProfile, p: int) -> SignatureProfile:
    """The profile of w -> sigma(w^p), the signature function of a (p, 1) cable."""
    if p < 1:
        raise DomainError(f"cable parameter must be positive, got {p}")
    if p == 1:
        return profile
    cp = dickson(p)
    candidates: list[CircleRoot] = []
    for minpoly in {item.root.minpoly for item in profile.jumps}:
        composed = minpoly.compose(cp)
        for factor, _ in composed.factor_list()[1]:
            candidates.extend(_roots_of_factor(_canonical(factor)))

    def level_on_arc(lower: Optional[Fraction], upper: Fraction) -> int:
        u = _midpoint(lower, upper)
        return profile.level_at_u(to_fraction(cp.eval(_rational(u))))

    return _assemble(candidates, level_on_arc)


# rho_0


@contextmanager
def interval_precision(dps: int):
    saved = iv.dps
    iv.dps = dps
    try:
        with mp.workdps(dps + 10):
            yield
    finally:
        iv.dps = saved


def endpoints(x) -> tuple:
    """Lower and upper ends of an mpmath interval as mp numbers."""
    a, b = iv.convert(x)._mpi_
    return mp.make_mpf(a), mp.make_mpf(b)


def _iv_fraction(x: Fraction):
    return iv.mpf(x.numerator) / x.denominator


def _iv_acos(x):
    """arccos on an interval inside (-1, 1), as atan2(sqrt(1 - x^2), x) with outward rounding."""
    return iv.atan2(iv.sqrt(1 - x * x), x)


def _theta_interval(root: CircleRoot, dps: int):
    """Enclosure of arccos(u/2) for the root."""
    root = root.narrowed(Fraction(1, 10 ** (dps + 3)))
    lo_u, hi_u = endpoints(_iv_fraction(root.lo))[0], endpoints(_iv_fraction(root.hi))[1]
    return _iv_acos(iv.mpf([lo_u, hi_u]) / 2)


@dataclass(frozen=True)
class RhoValue:
    """rho_0 as an exact expression plus a certified enclosure."""

    symbolic: object
    interval: object
    dps: int
    profile: SignatureProfile = field(repr=False)

    @property
    def lower(self):
        return endpoints(self.interval)[0]

    @property
    def upper(self):
        return endpoints(self.interval)[1]

    @property
    def width(self):
        lo, hi = endpoints(self.interval)
        return hi - lo

    def enclosure(self, dps: int):
        if dps <= self.dps:
            return self.interval
        return rho0(self.profile, dps).interval

    def contains(self, x) -> bool:
        lo, hi = endpoints(self.interval)
        return lo <= x <= hi

    def overlaps(self, other) -> bool:
        """True when the enclosures meet; ``other`` is a RhoValue or an interval."""
        theirs = other.interval if isinstance(other, RhoValue) else other
        lo, hi = endpoints(self.interval)
        other_lo, other_hi = endpoints(theirs)
        return not (hi < other_lo or other_hi < lo)

    def __str__(self) -> str:
        with mp.workdps(self.dps):
            lo, hi = endpoints(self.interval)
            return mp.nstr((lo + hi) / 2, min(self.dps, 20))


def rho0(profile: SignatureProfile, dps: Optional[int] = None) -> RhoValue:
    """
    Integral of the signature over the circle, total measure 1.

    Each jump J at angle theta contributes J(1 - theta/pi): the level it
    creates persists from theta to pi and the lower half circle mirrors it.
    """
    dps = dps or get_settings().numeric_dps
    symbolic = sum(
        (item.jump * (1 - acos(item.root.value() / 2) / pi) for item in profile.jumps),
        Rational(0),
    )
    with interval_precision(dps):
        total = iv.mpf(0)
        for item in profile.jumps:
            theta = _theta_interval(item.root, dps)
            total += item.jump * (1 - theta / iv.pi)
    return RhoValue(symbolic=symbolic, interval=total, dps=dps, profile=profile)


def _theta_of(s: Optional[Fraction]):
    if s is None:
        return mp.pi
    return 2 * mp.atan(mp.mpf(s.numerator) / s.denominator)


def _parameter_at(theta) -> Optional[Fraction]:
    if theta >= mp.pi:
        return None
    return Fraction(mp.nstr(mp.tan(theta / 2), mp.dps - 5, min_fixed=-mp.inf, max_fixed=mp.inf))


def rho0_by_bisection(
    V: SeifertMatrix, tolerance: Fraction = Fraction(1, 10**12), grid: int = 64
):
    """
    Second route to rho_0: integrate sigma over theta in [0, pi] by sampling
    signature_at on a grid and bisecting every cell whose ends disagree.

    Returns an mpmath interval. Only the grid and bisection points are
    evaluated: a pair of jumps inside one grid cell whose ends agree is not
    seen, so this is a cross-check of rho0, not a certificate.
    """
    with interval_precision(30):
        tol = mp.mpf(tolerance.numerator) / tolerance.denominator
        cache: dict = {}

        def sample(theta):
            s = _parameter_at(theta)
            key = s
            if key not in cache:
                cache[key] = (_theta_of(s), signature_at(V, s))
            return cache[key]

        def integrate(a, b):
            (ta, la), (tb, lb) = a, b
            if la == lb:
                return iv.mpf(la) * (iv.mpf(tb) - iv.mpf(ta))
            if tb - ta < tol:
                width = iv.mpf(tb) - iv.mpf(ta)
                return iv.mpf([min(la, lb), max(la, lb)]) * width
            middle = sample((ta + tb) / 2)
            return integrate(a, middle) + integrate(middle, b)

        points = [(mp.mpf(0), 0)]
        points.extend(sample(mp.pi * i / grid) for i in range(1, grid))
        points.append((mp.pi, signature_at(V, None)))
        total = iv.mpf(0)
        for a, b in zip(points, points[1:]):
            total += integrate(a, b)
        return total / iv.pi


def profile_table(profile: SignatureProfile, digits: int = 8) -> list[tuple[str, str, int]]:
    """Rows (theta/pi start, theta/pi end, level) for each arc of the upper half circle."""
    bounds = ["0"]
    bounds.extend(mp.nstr(item.root.theta_over_pi(digits), digits) for item in profile.jumps)
    bounds.append("1")
    levels = [0] + profile.levels()
    return [(bounds[i], bounds[i + 1], levels[i]) for i in range(len(levels))]


# Integer relations


@dataclass(frozen=True)
class CertifiedReal:
    """A real number known through enclosures at any requested precision."""

    producer: Callable[[int], object]
    label: str = ""

    @classmethod
    def fixed(cls, interval, label: str = "") -> CertifiedReal:
        return cls(lambda _dps: interval, label)

    @classmethod
    def from_rho(cls, value: RhoValue, label: str = "") -> CertifiedReal:
        return cls(value.enclosure, label)

    def enclosure(self, dps: int):
        return self.producer(dps)


def _certified_small(values: Sequence[CertifiedReal], coeffs, dps: int, precision) -> bool:
    with interval_precision(dps):
        total = iv.mpf(0)
        for c, value in zip(coeffs, values):
            total += c * value.enclosure(dps)
        lo, hi = endpoints(total)
        bound = endpoints(iv.mpf(precision.numerator) / precision.denominator)[0]
        return max(abs(lo), abs(hi)) < bound


def _normalized(coeffs: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in coeffs:
        g = gcd(g, c)
    coeffs = [c // g for c in coeffs]
    first = next(c for c in coeffs if c)
    return tuple(-c for c in coeffs) if first < 0 else tuple(coeffs)


def small_relation_search(
    values: Sequence[CertifiedReal],
    coeff_bound: int,
    precision: Fraction,
    dps: Optional[int] = None,
) -> Optional[tuple[int, ...]]:
    """
    Exhaustive search for c with |c_i| <= coeff_bound and |sum c_i v_i| < precision.

    The entry of largest magnitude is solved for: for each of the
    (2B + 1)^(n - 1) free vectors, every pivot coefficient whose approximate
    residual is within max(precision, 1e-6) plus the enclosure widths is
    tried. A relation is returned only when interval arithmetic certifies it
    at ``dps`` digits and again at four times that, the all-zero case included.
    """
    settings = get_settings()
    values = list(values)
    if len(values) > settings.relation_max_values:
        raise DomainError("use smaller family")
    if not values or coeff_bound < 1:
        return None
    precision = Fraction(precision)
    digits = len(str(precision.denominator // max(precision.numerator, 1)))
    dps = max(dps or settings.numeric_dps, digits + 10)

    with interval_precision(dps):
        ends = [endpoints(value.enclosure(dps)) for value in values]
        approx = [(lo + hi) / 2 for lo, hi in ends]
    pivot = max(range(len(values)), key=lambda i: abs(approx[i]))
    others = [i for i in range(len(values)) if i != pivot]

    def certified(coeffs) -> Optional[tuple[int, ...]]:
        if not _certified_small(values, coeffs, dps, precision):
            return None
        if not _certified_small(values, coeffs, 4 * dps, precision):
            return None
        relation = _normalized(coeffs)
        logger.info(f"Certified integer relation {relation}")
        return relation

    if approx[pivot] == 0:
        found = certified([1] + [0] * (len(values) - 1))
        if found is not None:
            return found

    with mp.workdps(dps):
        widths = sum((hi - lo for lo, hi in ends), mp.mpf(0))
        screen = (
            max(mp.mpf(precision.numerator) / precision.denominator, mp.mpf(10) ** -6)
            + coeff_bound * widths
            + mp.mpf(10) ** -(dps - 5)
        )
        a = approx[pivot]
        for free in product(range(-coeff_bound, coeff_bound + 1), repeat=len(others)):
            partial = sum((c * approx[i] for c, i in zip(free, others)), mp.mpf(0))
            if a == 0:
                if abs(partial) > screen:
                    continue
                low, high = -coeff_bound, coeff_bound
            else:
                ends_c = sorted([(-screen - partial) / a, (screen - partial) / a])
                low = max(-coeff_bound, int(mp.ceil(ends_c[0])))
                high = min(coeff_bound, int(mp.floor(ends_c[1])))
            for c_pivot in range(low, high + 1):
                coeffs = [0] * len(values)
                for c, i in zip(free, others):
                    coeffs[i] = c
                coeffs[pivot] = c_pivot
                if not any(coeffs):
                    continue
                found = certified(coeffs)
                if found is not None:
                    return found
    return None
