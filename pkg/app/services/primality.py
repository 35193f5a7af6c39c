"""
Irreducibility, strong primality and strong coprimality in Q[t, t^-1].

Every negative verdict carries a witness that is re-checked before it is
returned: a factor that divides exactly, or exponents (k, l) for which
gcd(f(t^k), g(t^l)) is nontrivial.
"""

from fractions import Fraction
from itertools import combinations, product
from math import comb, gcd as int_gcd, isqrt, lcm as int_lcm
from typing import Optional, Sequence

from sympy import divisors, factorint, integer_nthroot, isprime
from sympy import perfect_power, primefactors

from app.config import get_settings
from app.services.laurent import (
    LaurentPoly,
    gcd,
    normalize,
    resultant,
    substitute_power,
)
from app.utils.constants import EISENSTEIN_SHIFT
from app.utils.errors import BudgetExceededError, DomainError
from app.utils.global_logging import get_logger
from app.utils.types import (
    BonciocatResult,
    CoprimalityStatus,
    CoprimalityVerdict,
    IrreducibilityMethod,
    IrreducibilityStatus,
    IrreducibilityVerdict,
    StrongPrimalityStatus,
    StrongPrimalityVerdict,
)

logger = get_logger(__name__)


def _signed_divisors(n: int) -> list[int]:
    positive = divisors(abs(n))
    return positive + [-d for d in positive]


def _valuation(n: int, q: int) -> Optional[int]:
    """q-adic valuation; None stands for infinity (n = 0)."""
    if n == 0:
        return None
    v = 0
    while n % q == 0:
        n //= q
        v += 1
    return v


def _is_perfect_power(n: int) -> bool:
    """True when |n| = x^c for some integer x and c > 1."""
    n = abs(n)
    if n <= 1:
        return True
    return bool(perfect_power(n))


def rational_root_factor(f: LaurentPoly) -> Optional[LaurentPoly]:
    """A linear factor q*t - p of f, or None when f has no rational root."""
    f = normalize(f)
    coeffs = f.integer_coefficients()
    a0, ad = coeffs[0], coeffs[-1]
    for q in divisors(abs(ad)):
        for p in _signed_divisors(a0):
            if int_gcd(p, q) != 1:
                continue
            if f.evaluate(Fraction(p, q)) == 0:
                return normalize(LaurentPoly({1: q, 0: -p}))
    return None


def eisenstein_criterion(f: LaurentPoly) -> Optional[int]:
    """A prime p for which Eisenstein applies to f or its reciprocal, else None.

    Shifts t -> t + c for small |c| are tried as well; each shift preserves
    irreducibility.
    """
    f = normalize(f)
    base, _ = f.to_poly()
    for shift in sorted(range(-EISENSTEIN_SHIFT, EISENSTEIN_SHIFT + 1), key=abs):
        shifted = LaurentPoly.from_poly(base.shift(shift)) if shift else f
        if shifted.min_exp != 0 or shifted.is_monomial:
            continue
        for candidate in (shifted, normalize(shifted.reciprocal())):
            coeffs = candidate.shift(-candidate.min_exp).integer_coefficients()
            lower = coeffs[:-1]
            common = 0
            for c in lower:
                common = int_gcd(common, c)
            if common in (0, 1):
                continue
            for p in primefactors(common):
                if coeffs[-1] % p != 0 and coeffs[0] % (p * p) != 0:
                    logger.debug(f"Eisenstein applies to {f} at p={p}, shift {shift}")
                    return p
    return None


def bonciocat_criterion(f: LaurentPoly, q1: int, q2: int) -> BonciocatResult:
    """Two-prime valuation criterion on the primitive integer form of f."""
    if q1 == q2 or not isprime(q1) or not isprime(q2):
        raise DomainError("invalid prime pair")
    if f.is_zero:
        raise DomainError("criterion needs a nonzero polynomial")
    coeffs = normalize(f).integer_coefficients()
    d = len(coeffs) - 1
    primes = (q1, q2)
    if d < 1:
        return BonciocatResult(status="Inconclusive", primes=primes, reason="unit")
    alphas: list[int] = []
    for q in primes:
        r = [_valuation(c, q) for c in coeffs]
        r0, rd = r[0], r[-1]
        for j in range(1, d):
            if r[j] is not None and r[j] * d < (d - j) * r0 + j * rd:
                return BonciocatResult(
                    status="Inconclusive",
                    primes=primes,
                    reason=f"convexity fails at j={j} for q={q}",
                )
        if (r0 == 0) == (rd == 0):
            return BonciocatResult(
                status="Inconclusive",
                primes=primes,
                reason=f"need exactly one of r_0, r_d nonzero for q={q}",
            )
        alphas.append(r0 if r0 else rd)
    a1, a2 = alphas
    if int_gcd(int_gcd(a1, d), int_gcd(a2, d)) == 1:
        return BonciocatResult(status="Irreducible", primes=primes, alphas=(a1, a2))
    return BonciocatResult(
        status="Inconclusive",
        primes=primes,
        alphas=(a1, a2),
        reason=f"gcd(alpha_1, {d}) and gcd(alpha_2, {d}) share a factor",
    )


def bonciocat_alphas(f: LaurentPoly, q1: int, q2: int) -> Optional[tuple[int, int]]:
    """(alpha_1, alpha_2) for reporting, or None when the valuation pattern fails."""
    return bonciocat_criterion(f, q1, q2).alphas


def _prime_pairs(coeffs: list[int]) -> list[tuple[int, int]]:
    primes = sorted(set(primefactors(abs(coeffs[0] * coeffs[-1]))))[:8]
    return list(combinations(primes, 2))


def _mignotte_bounds(coeffs: list[int], m: int) -> list[int]:
    norm = isqrt(sum(c * c for c in coeffs)) + 1
    return [comb(m, j) * norm for j in range(m + 1)]


def _lagrange_basis(points: list[int]) -> list[LaurentPoly]:
    t = LaurentPoly.t()
    basis = []
    for i, xi in enumerate(points):
        numerator = LaurentPoly.one()
        denominator = 1
        for j, xj in enumerate(points):
            if i != j:
                numerator = numerator * (t - xj)
                denominator *= xi - xj
        basis.append(numerator.scale(Fraction(1, denominator)))
    return basis


def _evaluation_points(f: LaurentPoly, count: int) -> list[int]:
    """count integer points where f is nonzero, preferring small values."""
    candidates = []
    for x in range(-3 * count - 3, 3 * count + 4):
        value = f.evaluate(x)
        if value != 0:
            candidates.append((abs(value), abs(x), x))
    candidates.sort()
    return sorted(x for _, _, x in candidates[:count])


def exhaustive_factor_search(f: LaurentPoly, max_candidates: Optional[int] = None):
    """Search every integer factor of degree <= span/2.

    Factor values at span/2 + 1 integer points must divide the values of f;
    each choice is interpolated and filtered by the leading/trailing
    coefficient divisibility and the Mignotte coefficient bound. Returns a
    proper factor or None; raises BudgetExceededError past the budget.
    """
    budget = max_candidates or get_settings().factor_search_max_candidates
    f = normalize(f)
    coeffs = f.integer_coefficients()
    d = len(coeffs) - 1
    a0, ad = coeffs[0], coeffs[-1]
    examined = 0
    for m in range(1, d // 2 + 1):
        points = _evaluation_points(f, m + 1)
        choices = [_signed_divisors(int(f.evaluate(x))) for x in points]
        # g and -g are the same factor up to a unit
        choices[0] = [v for v in choices[0] if v > 0]
        total = 1
        for c in choices:
            total *= len(c)
        examined += total
        if examined > budget:
            raise BudgetExceededError(
                f"factor search for {f} needs more than {budget} candidates"
            )
        logger.debug(f"degree {m} factor search over {total} candidates")
        basis = _lagrange_basis(points)
        bounds = _mignotte_bounds(coeffs, m)
        for values in product(*choices):
            g = LaurentPoly.zero()
            for value, poly in zip(values, basis):
                g = g + poly.scale(value)
            if g.is_zero or g.is_monomial or g.min_exp != 0:
                continue
            g_coeffs = g.coefficients()
            if any(c.denominator != 1 for c in g_coeffs):
                continue
            ints = [c.numerator for c in g_coeffs]
            if ad % ints[-1] or a0 % ints[0]:
                continue
            if any(abs(c) > b for c, b in zip(ints, bounds)):
                continue
            if g.divides(f):
                return normalize(g)
    return None


def is_irreducible(f: LaurentPoly) -> IrreducibilityVerdict:
    """Decide irreducibility of f in Q[t, t^-1]."""
    if f.is_zero:
        raise DomainError("irreducibility of the zero polynomial is undefined")
    f = normalize(f)
    if f.is_monomial:
        return IrreducibilityVerdict(
            polynomial=f, status=IrreducibilityStatus.UNIT, method=IrreducibilityMethod.UNIT
        )
    d = f.span
    if d == 1:
        return IrreducibilityVerdict(
            polynomial=f,
            status=IrreducibilityStatus.IRREDUCIBLE,
            method=IrreducibilityMethod.DEGREE_ONE,
        )
    linear = rational_root_factor(f)
    if linear is not None:
        return IrreducibilityVerdict(
            polynomial=f,
            status=IrreducibilityStatus.REDUCIBLE,
            method=IrreducibilityMethod.RATIONAL_ROOT,
            witness=linear,
            detail=f"rational root of {linear}",
        )
    if d <= 3:
        return IrreducibilityVerdict(
            polynomial=f,
            status=IrreducibilityStatus.IRREDUCIBLE,
            method=IrreducibilityMethod.RATIONAL_ROOT,
            detail="no rational root",
        )
    p = eisenstein_criterion(f)
    if p is not None:
        return IrreducibilityVerdict(
            polynomial=f,
            status=IrreducibilityStatus.IRREDUCIBLE,
            method=IrreducibilityMethod.EISENSTEIN,
            detail=f"Eisenstein at p={p}",
        )
    coeffs = f.integer_coefficients()
    for q1, q2 in _prime_pairs(coeffs):
        result = bonciocat_criterion(f, q1, q2)
        if result.status == "Irreducible":
            return IrreducibilityVerdict(
                polynomial=f,
                status=IrreducibilityStatus.IRREDUCIBLE,
                method=IrreducibilityMethod.BONCIOCAT,
                detail=f"primes {result.primes}, alphas {result.alphas}",
            )
    factor = exhaustive_factor_search(f)
    if factor is not None:
        return IrreducibilityVerdict(
            polynomial=f,
            status=IrreducibilityStatus.REDUCIBLE,
            method=IrreducibilityMethod.EXHAUSTIVE,
            witness=factor,
        )
    return IrreducibilityVerdict(
        polynomial=f,
        status=IrreducibilityStatus.IRREDUCIBLE,
        method=IrreducibilityMethod.EXHAUSTIVE,
        detail="no factor of degree <= span/2",
    )


def low_terms_criterion_applies(f: LaurentPoly) -> bool:
    """Low-order coefficient criterion on the normalized f.

    f must additionally be irreducible for the criterion to conclude.
    """
    coeffs = normalize(f).integer_coefficients()
    a0, a1 = coeffs[0], coeffs[1]
    return a0 != 0 and a1 != 0 and int_gcd(a0, a1) == 1 and not _is_perfect_power(a0)


def _binomial_alphas(f: LaurentPoly) -> list[tuple[int, int, int, int]]:
    """Prime pairs (q1, q2, alpha1, alpha2) usable for every f(t^k) of a binomial f."""
    coeffs = normalize(f).integer_coefficients()
    a0, ad = coeffs[0], coeffs[-1]
    found = []
    for q1, q2 in combinations(primefactors(abs(a0 * ad)), 2):
        alphas = []
        for q in (q1, q2):
            r0, rd = _valuation(a0, q), _valuation(ad, q)
            if (r0 == 0) == (rd == 0):
                break
            alphas.append(r0 or rd)
        if len(alphas) == 2 and int_gcd(*alphas) == 1:
            found.append((q1, q2, alphas[0], alphas[1]))
    return found


def strongly_prime(f: LaurentPoly, search_bound: Optional[int] = None) -> StrongPrimalityVerdict:
    """Decide whether f(t^k) is irreducible for every nonzero k, where a route applies."""
    if f.is_zero:
        raise DomainError("strong primality of the zero polynomial is undefined")
    f = normalize(f)
    if f.is_monomial:
        raise DomainError("strong primality is undefined for units")
    bound = search_bound or get_settings().strong_prime_search_bound
    trace: list[str] = []

    base = is_irreducible(f)
    trace.append(f"f irreducible? {base.status.value} via {base.method.value}")
    if not base.is_irreducible:
        return StrongPrimalityVerdict(
            polynomial=f,
            status=StrongPrimalityStatus.NOT_STRONGLY_PRIME,
            witness_k=1,
            certificate=trace,
        )

    if low_terms_criterion_applies(f):
        trace.append("low-terms criterion: a1, a0 coprime, a0 not a perfect power")
        return StrongPrimalityVerdict(
            polynomial=f, status=StrongPrimalityStatus.STRONGLY_PRIME, certificate=trace
        )
    trace.append("low-terms criterion does not apply to f")

    recip = normalize(f.reciprocal())
    if low_terms_criterion_applies(recip):
        trace.append(f"low-terms criterion applies to f(t^-1) = {recip}")
        return StrongPrimalityVerdict(
            polynomial=f, status=StrongPrimalityStatus.STRONGLY_PRIME, certificate=trace
        )
    trace.append("low-terms criterion does not apply to f(t^-1)")

    if len(f.terms) == 2:
        pairs = _binomial_alphas(f)
        if pairs:
            q1, q2, a1, a2 = pairs[0]
            trace.append(
                f"two-prime criterion with (q1, q2) = ({q1}, {q2}), "
                f"alphas ({a1}, {a2}) coprime: holds for every exponent"
            )
            return StrongPrimalityVerdict(
                polynomial=f, status=StrongPrimalityStatus.STRONGLY_PRIME, certificate=trace
            )
        trace.append("no prime pair with coprime valuations")

    for k in range(2, bound + 1):
        try:
            verdict = is_irreducible(substitute_power(f, k))
        except BudgetExceededError as exc:
            trace.append(f"search stopped at k={k}: {exc.message}")
            logger.warning(f"strong primality search for {f} stopped: {exc.message}")
            return StrongPrimalityVerdict(
                polynomial=f, status=StrongPrimalityStatus.UNKNOWN, certificate=trace
            )
        if not verdict.is_irreducible:
            trace.append(f"f(t^{k}) has factor {verdict.witness}")
            return StrongPrimalityVerdict(
                polynomial=f,
                status=StrongPrimalityStatus.NOT_STRONGLY_PRIME,
                witness_k=k,
                certificate=trace,
            )
    trace.append(f"f(t^k) irreducible for 2 <= k <= {bound}; no criterion covers all k")
    logger.warning(f"strong primality of {f} left Unknown")
    return StrongPrimalityVerdict(
        polynomial=f, status=StrongPrimalityStatus.UNKNOWN, certificate=trace
    )


def catalan_solutions(x_max: int, y_max: int, a_max: int, b_max: int) -> list[tuple[int, int, int, int]]:
    """All (x, a, y, b) with x^a - y^b = 1 inside the bounds, x, y, a, b >= 2."""
    found = []
    for y in range(2, y_max + 1):
        for b in range(2, b_max + 1):
            target = y**b + 1
            if target > x_max**a_max:
                break
            for a in range(2, a_max + 1):
                if target > x_max**a:
                    continue
                x, exact = integer_nthroot(target, a)
                if x < 2:
                    break
                if exact:
                    found.append((int(x), a, y, b))
    return sorted(found)


# Strong coprimality


def _binomial_root(h: LaurentPoly) -> Optional[tuple[Fraction, int]]:
    """(r, m) when h is a unit multiple of t^m - r."""
    if len(h.terms) != 2:
        return None
    (e0, c0), (e1, c1) = sorted(h.terms.items())
    return -c0 / c1, e1 - e0


def _exponent_vector(r: Fraction) -> dict[int, int]:
    vector = dict(factorint(abs(r.numerator)))
    for p, e in factorint(r.denominator).items():
        vector[p] = vector.get(p, 0) - e
    vector.pop(1, None)
    return vector


def _binomial_pair_witness(r1: Fraction, m1: int, r2: Fraction, m2: int):
    """Nonzero (a, b) with f(t^a), g(t^b) sharing a root, for t^m1 - r1 and t^m2 - r2."""
    v1, v2 = _exponent_vector(r1), _exponent_vector(r2)
    e1, e2 = int(r1 < 0), int(r2 < 0)
    if not v1 and not v2:
        L = int_lcm(m1, m2)
        if e1 == e2:
            A, B = L, L
        elif e1 == 0:
            A, B = 2 * L, L
        else:
            A, B = L, 2 * L
        return A // m1, B // m2
    if not v1 or not v2 or set(v1) != set(v2):
        return None
    # v1 = (P/Q) v2 with gcd(P, Q) = 1, Q > 0
    ratios = {Fraction(v1[p], v2[p]) for p in v1}
    if len(ratios) != 1:
        return None
    ratio = ratios.pop()
    P, Q = ratio.numerator, ratio.denominator
    if (e1 * Q - e2 * P) % 2:
        return None
    c0 = int_lcm(m1 // int_gcd(m1, abs(P)), m2 // int_gcd(m2, Q))
    return c0 * P // m1, c0 * Q // m2


def _nontrivial_after_substitution(f: LaurentPoly, g: LaurentPoly, a: int, b: int) -> bool:
    return gcd(substitute_power(f, a), substitute_power(g, b)).span > 0


def _irreducible_factors(f: LaurentPoly) -> list[LaurentPoly]:
    poly, _ = normalize(f).to_poly()
    _, factors = poly.factor_list()
    return [LaurentPoly.from_poly(h) for h, _ in factors]


def strongly_coprime(f: LaurentPoly, g: LaurentPoly) -> CoprimalityVerdict:
    """Decide coprimality of f(t^k) and g(t^l) for all nonzero k, l."""
    if f.is_zero or g.is_zero:
        raise DomainError("strong coprimality of the zero polynomial is undefined")
    f, g = normalize(f), normalize(g)
    if f.is_monomial or g.is_monomial:
        return CoprimalityVerdict(
            status=CoprimalityStatus.STRONGLY_COPRIME, detail="a unit is coprime to everything"
        )
    if gcd(f, g).span > 0:
        return CoprimalityVerdict(
            status=CoprimalityStatus.NOT_STRONGLY_COPRIME,
            witness=(1, 1),
            detail=f"common factor {gcd(f, g)}",
        )

    roots_f = [_binomial_root(h) for h in _irreducible_factors(f)]
    roots_g = [_binomial_root(h) for h in _irreducible_factors(g)]
    if all(roots_f) and all(roots_g):
        suspect = False
        for (r1, m1), (r2, m2) in product(roots_f, roots_g):
            witness = _binomial_pair_witness(r1, m1, r2, m2)
            if witness is None:
                continue
            a, b = witness
            if _nontrivial_after_substitution(f, g, a, b):
                return CoprimalityVerdict(
                    status=CoprimalityStatus.NOT_STRONGLY_COPRIME,
                    witness=(a, b),
                    detail=f"roots {r1}^(1/{m1}) and {r2}^(1/{m2}) are multiplicatively dependent",
                )
            logger.error(f"witness {witness} for {f}, {g} failed re-verification")
            suspect = True
        if suspect:
            return CoprimalityVerdict(
                status=CoprimalityStatus.UNKNOWN, detail="root witness failed re-verification"
            )
        return CoprimalityVerdict(
            status=CoprimalityStatus.STRONGLY_COPRIME,
            detail="binomial roots are multiplicatively independent",
        )

    bound = get_settings().coprime_search_bound
    for a in range(1, bound + 1):
        for b in range(-bound, bound + 1):
            if b != 0 and _nontrivial_after_substitution(f, g, a, b):
                return CoprimalityVerdict(
                    status=CoprimalityStatus.NOT_STRONGLY_COPRIME, witness=(a, b)
                )
    logger.warning(f"strong coprimality of {f} and {g} left Unknown")
    return CoprimalityVerdict(
        status=CoprimalityStatus.UNKNOWN,
        detail=f"non-binomial factors; no witness with |k|, |l| <= {bound}",
    )


def sequences_strongly_coprime(P: Sequence[LaurentPoly], Q: Sequence[LaurentPoly]) -> CoprimalityVerdict:
    """P is strongly coprime to Q when gcd(p1, q1) = 1 or some later pair is strongly coprime."""
    if not P or not Q:
        raise DomainError("sequences must be nonempty")
    if len(P) != len(Q):
        raise DomainError(f"sequence lengths differ: {len(P)} vs {len(Q)}")
    first = resultant(normalize(P[0]), normalize(Q[0]))
    if first != 0:
        return CoprimalityVerdict(
            status=CoprimalityStatus.STRONGLY_COPRIME,
            index=1,
            resultant=first,
            detail="first entries coprime",
        )
    unknown = False
    for i in range(1, len(P)):
        verdict = strongly_coprime(P[i], Q[i])
        if verdict.status == CoprimalityStatus.STRONGLY_COPRIME:
            return verdict.model_copy(update={"index": i + 1})
        unknown = unknown or verdict.status == CoprimalityStatus.UNKNOWN
    if unknown:
        return CoprimalityVerdict(status=CoprimalityStatus.UNKNOWN, index=1)
    return CoprimalityVerdict(
        status=CoprimalityStatus.NOT_STRONGLY_COPRIME,
        witness=(1, 1),
        index=1,
        detail="first entries share a factor and no later pair is strongly coprime",
    )
