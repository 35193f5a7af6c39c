"""
Knot expressions and the invariants computed over them.

Leaves are the unknot, twist knots and named base knots; interior nodes are
connected sum, mirror-reverse, (p, 1) cabling and winding-zero infection by a
doubling operator. Every node carries a stable text label; labels are what
facts files and rho atoms refer to.

Grammar::

    unknot | twist(j) | base("name") | sum(e, e, ...) | neg(e)
    cable(e, p[, q]) | infect(R(k[, J='name']), e) | infect(Q(k), e)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache, reduce
from typing import Optional

from mpmath import mp

from app.services import rho_ledger
from app.services.facts import FactBook
from app.services.laurent import LaurentPoly, normalize, substitute_power
from app.services.legendrian import builtin_front, classical_invariants
from app.services.legendrian import legendrian_connected_sum, legendrian_satellite
from app.services.legendrian import operator_invariants, stabilize, tau_bounds
from app.services.rho_ledger import OperatorSpec, rho_ledger_infection
from app.services.seifert import SeifertMatrix, alexander_polynomial, arf
from app.services.seifert import connected_sum, figure_eight, mirror, twist
from app.services.signature_fn import RhoValue, SignatureProfile, cable_pullback
from app.services.signature_fn import endpoints, levine_tristram_profile, profile_table
from app.services.signature_fn import rho0
from app.utils.errors import DomainError, ParseError, UnsupportedError
from app.utils.global_logging import get_logger
from app.utils.parsers import TokenStream
from app.utils.types import InvariantReport, LegInvariants, ProfileRow, TauBounds

logger = get_logger(__name__)


# Expression nodes


class KnotExpr:
    @property
    def label(self) -> str:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class Unknot(KnotExpr):
    @property
    def label(self) -> str:
        return "unknot"


@dataclass(frozen=True)
class Twist(KnotExpr):
    j: int

    def __post_init__(self):
        if self.j < 1:
            raise DomainError(f"twist knot needs j >= 1, got {self.j}")

    @property
    def label(self) -> str:
        return f"twist({self.j})"


@dataclass(frozen=True)
class Base(KnotExpr):
    """
    A named knot given by a Seifert matrix. ``positive``/``negative`` record
    that changing crossings of that sign turns it into a slice knot.
    """

    name: str
    matrix: SeifertMatrix
    legendrian: Optional[LegInvariants] = None
    genus: Optional[int] = None
    positive: bool = False
    negative: bool = False
    note: str = ""

    @property
    def label(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sum(KnotExpr):
    terms: tuple[KnotExpr, ...]

    def __post_init__(self):
        if not self.terms:
            raise DomainError("a connected sum needs at least one summand")

    @property
    def label(self) -> str:
        return f"sum({', '.join(term.label for term in self.terms)})"


@dataclass(frozen=True)
class MirrorReverse(KnotExpr):
    expr: KnotExpr

    @property
    def label(self) -> str:
        return f"neg({self.expr.label})"


@dataclass(frozen=True)
class Cable(KnotExpr):
    expr: KnotExpr
    p: int
    q: int = 1

    def __post_init__(self):
        if self.p < 1:
            raise DomainError(f"cable parameter must be positive, got {self.p}")

    @property
    def label(self) -> str:
        if self.q == 1:
            return f"cable({self.expr.label}, {self.p})"
        return f"cable({self.expr.label}, {self.p}, {self.q})"


@dataclass(frozen=True)
class Infect(KnotExpr):
    op: OperatorSpec
    companion: KnotExpr

    @property
    def label(self) -> str:
        return f"infect({self.op.label}, {self.companion.label})"


def infect_times(op: OperatorSpec, companion: KnotExpr, n: int) -> KnotExpr:
    """op applied n times: op(op(...op(companion)))."""
    if n < 0:
        raise DomainError(f"iteration count must be nonnegative, got {n}")
    for _ in range(n):
        companion = Infect(op, companion)
    return companion


# Base registry

WHITEHEAD_DOUBLE = SeifertMatrix([[-1, 1], [0, 0]])

NEG_TREFOILS_RE = re.compile(r"^neg-trefoils-(\d+)$")


def neg_trefoils(n: int) -> Base:
    """Connected sum of n left-handed trefoils."""
    if n < 1:
        raise DomainError(f"need at least one trefoil, got {n}")
    matrix = reduce(connected_sum, [mirror(twist(1))] * n)
    return Base(
        f"neg-trefoils-{n}",
        matrix,
        genus=n,
        negative=True,
        note=f"changing {n} negative crossings unknots it",
    )


BASE_KNOTS: dict[str, Base] = {
    "trefoil": Base(
        "trefoil",
        twist(1),
        LegInvariants(tb=1, rot=0),
        positive=True,
        note="changing one positive crossing unknots it",
    ),
    "left-trefoil": Base(
        "left-trefoil",
        mirror(twist(1)),
        negative=True,
        note="changing one negative crossing unknots it",
    ),
    "figure-eight": Base(
        "figure-eight",
        figure_eight(),
        LegInvariants(tb=-3, rot=0),
        positive=True,
        negative=True,
        note="one crossing change of either sign unknots it",
    ),
    "whitehead-double": Base(
        "whitehead-double",
        WHITEHEAD_DOUBLE,
        LegInvariants(tb=1, rot=0),
        genus=1,
        positive=True,
        note="positive-clasped untwisted double of the right-handed trefoil; "
        "changing a clasp crossing unknots it",
    ),
}


def base_knot(name: str) -> KnotExpr:
    if name == "unknot":
        return Unknot()
    if name in BASE_KNOTS:
        return BASE_KNOTS[name]
    match = NEG_TREFOILS_RE.match(name)
    if match:
        return neg_trefoils(int(match.group(1)))
    raise DomainError(
        f"unknown base knot {name!r}; expected one of "
        f"{sorted(BASE_KNOTS) + ['neg-trefoils-<N>', 'unknot']}"
    )


def from_seifert(name: str, matrix: SeifertMatrix) -> Base:
    return Base(name, matrix)


# Invariants


@dataclass(frozen=True)
class KnotInvariants:
    alexander: LaurentPoly
    arf: int
    profile: SignatureProfile
    genus_upper: Optional[int] = None
    tau: Optional[TauBounds] = None
    legendrian: Optional[LegInvariants] = None

    @property
    def signature(self) -> int:
        return self.profile.value_at_minus_one

    @cached_property
    def rho0(self) -> RhoValue:
        return rho0(self.profile)


@lru_cache(maxsize=512)
def _matrix_invariants(V: SeifertMatrix) -> tuple[LaurentPoly, int, SignatureProfile]:
    return alexander_polynomial(V), arf(V), levine_tristram_profile(V)


@lru_cache(maxsize=64)
def _twist_legendrian(j: int) -> LegInvariants:
    return classical_invariants(builtin_front("twist-front", j))


@lru_cache(maxsize=64)
def _q_legendrian(k: int) -> LegInvariants:
    return operator_invariants(builtin_front("q-front", k))


def _exact(lower: int, upper: int) -> TauBounds:
    return TauBounds(lower=lower, upper=upper, exact=lower if lower == upper else None)


def _tau_from(leg: Optional[LegInvariants], genus: Optional[int]) -> Optional[TauBounds]:
    if genus is None:
        return None
    if leg is None:
        return _exact(-genus, genus)
    return tau_bounds(leg, genus)


def _intersect(first: Optional[TauBounds], second: Optional[TauBounds]) -> Optional[TauBounds]:
    if first is None or second is None:
        return first or second
    lower, upper = max(first.lower, second.lower), min(first.upper, second.upper)
    if lower > upper:
        raise DomainError(
            f"inconsistent certificate inputs: tau in [{first.lower}, {first.upper}] "
            f"and [{second.lower}, {second.upper}]"
        )
    return _exact(lower, upper)


def _companion_legendrian(companion: Optional[LegInvariants]) -> Optional[LegInvariants]:
    """Positive stabilizations down to tb = 0, when tb is nonnegative."""
    if companion is None or companion.tb < 0:
        return None
    while companion.tb > 0:
        companion = stabilize(companion, 1)
    return companion


def _evaluate(e: KnotExpr, facts: FactBook) -> KnotInvariants:
    match e:
        case Unknot():
            result = KnotInvariants(
                LaurentPoly.one(), 0, SignatureProfile(), 0, _exact(0, 0), LegInvariants(tb=-1, rot=0)
            )
        case Twist(j=j):
            delta, arf_value, profile = _matrix_invariants(twist(j))
            leg = _twist_legendrian(j)
            result = KnotInvariants(delta, arf_value, profile, 1, _tau_from(leg, 1), leg)
        case Base():
            delta, arf_value, profile = _matrix_invariants(e.matrix)
            genus = e.genus if e.genus is not None else e.matrix.genus
            result = KnotInvariants(
                delta, arf_value, profile, genus, _tau_from(e.legendrian, genus), e.legendrian
            )
        case Sum(terms=terms):
            parts = [_evaluate(term, facts) for term in terms]
            result = _sum(parts)
        case MirrorReverse(expr=inner):
            part = _evaluate(inner, facts)
            tau = part.tau
            if tau is not None:
                tau = _exact(-tau.upper, -tau.lower)
            result = KnotInvariants(
                normalize(part.alexander.reciprocal()), part.arf, -part.profile, part.genus_upper, tau
            )
        case Cable(expr=inner, p=p, q=q):
            if q != 1:
                raise UnsupportedError(f"only (p, 1) cables are supported, got ({p}, {q})")
            part = _evaluate(inner, facts)
            genus = p * part.genus_upper if part.genus_upper is not None else None
            result = KnotInvariants(
                normalize(substitute_power(part.alexander, p)),
                (p * part.arf) % 2,
                cable_pullback(part.profile, p),
                genus,
                _tau_from(None, genus),
            )
        case Infect(op=op, companion=companion):
            result = _infect(op, _evaluate(companion, facts))
        case _:
            raise DomainError(f"not a knot expression: {e!r}")
    return _with_tau_fact(e, result, facts)


def _sum(parts: list[KnotInvariants]) -> KnotInvariants:
    delta = normalize(reduce(lambda a, b: a * b, (part.alexander for part in parts)))
    arf_value = sum(part.arf for part in parts) % 2
    profile = reduce(lambda a, b: a + b, (part.profile for part in parts))
    genera = [part.genus_upper for part in parts]
    genus = sum(genera) if None not in genera else None
    legs = [part.legendrian for part in parts]
    leg = reduce(legendrian_connected_sum, legs) if None not in legs else None
    taus = [part.tau for part in parts]
    tau = None
    if None not in taus:
        tau = _exact(sum(t.lower for t in taus), sum(t.upper for t in taus))
    tau = _intersect(tau, _tau_from(leg, genus) if leg is not None else None)
    return KnotInvariants(delta, arf_value, profile, genus, tau, leg)


def _infect(op: OperatorSpec, companion: KnotInvariants) -> KnotInvariants:
    """Winding-zero infection keeps the pattern's Alexander polynomial, Arf and signatures."""
    _, arf_value, profile = _matrix_invariants(op.pattern)
    profile = cable_pullback(profile, op.cable_p)
    leg = None
    if op.front == "q-front" and op.cable_p == 1:
        stabilized = _companion_legendrian(companion.legendrian)
        if stabilized is not None:
            leg = legendrian_satellite(_q_legendrian(op.k), stabilized)
    genus = op.genus
    return KnotInvariants(
        op.alexander, (op.cable_p * arf_value) % 2, profile, genus, _tau_from(leg, genus), leg
    )


def _with_tau_fact(e: KnotExpr, result: KnotInvariants, facts: FactBook) -> KnotInvariants:
    found = facts.tau(e.label)
    if found is None:
        return result
    value, fact = found
    tau = _intersect(result.tau, _exact(value, value))
    logger.debug(f"tau({e.label}) = {value} from fact on line {fact.line}")
    return KnotInvariants(
        result.alexander, result.arf, result.profile, result.genus_upper, tau, result.legendrian
    )


def eval_invariants(e: KnotExpr, facts: Optional[FactBook] = None) -> KnotInvariants:
    """Recursive evaluation; ``tau <label> = v`` facts pin tau at matching nodes."""
    return _evaluate(e, facts or FactBook.empty())


# Reports


def _outward(value: RhoValue, digits: int = 20) -> tuple[str, str]:
    lo, hi = endpoints(value.interval)
    scale = mp.mpf(10) ** digits
    with mp.workdps(value.dps):
        return (
            mp.nstr(mp.floor(lo * scale) / scale, digits + 5),
            mp.nstr(mp.ceil(hi * scale) / scale, digits + 5),
        )


def invariant_report(e: KnotExpr, facts: Optional[FactBook] = None) -> InvariantReport:
    values = eval_invariants(e, facts)
    first_order = []
    if isinstance(e, Infect):
        for P in e.op.submodules:
            first_order.append(f"{P}: {rho_ledger_infection(e.op, e.companion, P)}")
    rows = [
        ProfileRow(start=start, end=end, level=level)
        for start, end, level in profile_table(values.profile)
    ]
    report = InvariantReport(
        expression=e.label,
        alexander=values.alexander,
        arf=values.arf,
        genus_upper=values.genus_upper,
        signature=values.signature,
        profile=rows,
        rho0_symbolic=str(values.rho0.symbolic),
        rho0_interval=_outward(values.rho0),
        tau=values.tau,
        legendrian=values.legendrian,
        first_order=first_order,
    )
    logger.info(f"Invariants of {e.label}: Delta = {values.alexander}, Arf = {values.arf}")
    return report


# Parsing


def _operator(stream: TokenStream) -> OperatorSpec:
    token = stream.expect_kind("name", "an operator R(...) or Q(...)")
    if token.text not in ("R", "Q"):
        raise ParseError(f"unknown operator {token.text!r}", token.position)
    stream.expect("(")
    k = stream.expect_int()
    if k < 1:
        raise ParseError(f"operator needs k >= 1, got {k}", token.position)
    if token.text == "Q":
        stream.expect(")")
        return rho_ledger.operator_q(k)
    companion_j = rho_ledger.DEFAULT_COMPANION_J
    if stream.accept(","):
        stream.expect("J")
        stream.expect("=")
        name = stream.expect_kind("string", "a quoted knot name")
        companion_j = name.text[1:-1]
        try:
            base_knot(companion_j)
        except DomainError as exc:
            raise ParseError(exc.message, name.position) from exc
    stream.expect(")")
    return rho_ledger.operator_r(k, companion_j)


def _expression(stream: TokenStream) -> KnotExpr:
    token = stream.expect_kind("name", "a knot expression")
    head = token.text
    if head == "unknot":
        return Unknot()
    if head not in ("twist", "base", "sum", "neg", "cable", "infect"):
        raise ParseError(f"unknown constructor {head!r}", token.position)
    stream.expect("(")
    if head == "twist":
        j = stream.expect_int()
        if j < 1:
            raise ParseError(f"twist knot needs j >= 1, got {j}", token.position)
        node: KnotExpr = Twist(j)
    elif head == "base":
        name = stream.expect_kind("string", "a quoted knot name")
        try:
            node = base_knot(name.text[1:-1])
        except DomainError as exc:
            raise ParseError(exc.message, name.position) from exc
    elif head == "sum":
        terms = [_expression(stream)]
        while stream.accept(","):
            terms.append(_expression(stream))
        node = Sum(tuple(terms))
    elif head == "neg":
        node = MirrorReverse(_expression(stream))
    elif head == "cable":
        inner = _expression(stream)
        stream.expect(",")
        p = stream.expect_int()
        q = stream.expect_int() if stream.accept(",") else 1
        if p < 1:
            raise ParseError(f"cable parameter must be positive, got {p}", token.position)
        node = Cable(inner, p, q)
    else:
        op = _operator(stream)
        stream.expect(",")
        node = Infect(op, _expression(stream))
    stream.expect(")")
    return node


def parse_knot_expr(text: str) -> KnotExpr:
    stream = TokenStream(text.strip())
    node = _expression(stream)
    stream.expect_end()
    return node
