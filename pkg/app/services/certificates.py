"""
Certificates for robustness, filtration levels and linear independence.

A certificate keeps what was machine-checked apart from what was assumed.
Assumptions come either from the facts book (first-order signatures) or from
named results about satellites and crossing changes; each carries a citation.
A conclusion is only written when no check failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from app.config import get_settings
from app.services.alexmodule import annihilator, cyclic_generator, is_isotropic
from app.services.alexmodule import isotropy_by_divisibility
from app.services.facts import FactBook
from app.services.knot_expr import Base, Cable, Infect, KnotExpr, MirrorReverse, Sum
from app.services.knot_expr import Twist, Unknot, base_knot, eval_invariants
from app.services.knot_expr import infect_times
from app.services.laurent import LaurentPoly
from app.services.primality import is_irreducible, sequences_strongly_coprime
from app.services.rho_ledger import DEFAULT_COMPANION_J, FOSStatus, OperatorSpec
from app.services.rho_ledger import cable_operator, operator_r
from app.services.seifert import SeifertMatrix, is_algebraically_slice_genus_one, twist
from app.services.signature_fn import CertifiedReal, small_relation_search
from app.utils.errors import DomainError, UnsupportedError
from app.utils.global_logging import get_logger
from app.utils.types import Certificate, CoprimalityStatus, IsotropyStatus

logger = get_logger(__name__)

INF = math.inf
ABSENT = -1

Level = Union[Fraction, int, float]

RELATION_COEFF_BOUND = 100
RELATION_PRECISION = Fraction(1, 10**30)

SATELLITE_CITATION = "Cochran-Orr-Teichner 2003; Cochran-Harvey-Horn 2013"
CROSSING_CITATION = "Cochran-Harvey-Horn 2013, crossing changes to a slice knot"


# Robustness


def robustness_check(
    op: OperatorSpec, facts: Optional[FactBook] = None, p: int = 1
) -> Certificate:
    """
    Every isotropic submodule of a robust operator either comes from a ribbon
    disk or carries a nonzero first-order signature.
    """
    facts = facts or FactBook.empty()
    op = cable_operator(op, p)
    base = op.base or op
    cert = Certificate(claim=f"{op.name} is a robust doubling operator")

    delta = base.module.delta_factor
    verdict = is_irreducible(delta)
    cert.check("delta irreducible", verdict.is_irreducible, f"{delta}: {verdict.method.value}")
    generator = cyclic_generator(base.pattern)
    order = annihilator(base.pattern, generator)
    cert.check(
        "cyclic of order delta(t) delta(t^-1)",
        order == base.module.delta,
        f"generator {generator} has order {order}",
    )
    if op.cable_p > 1:
        cabled = op.module.delta_factor
        verdict = is_irreducible(cabled)
        cert.check(
            f"delta(t^{op.cable_p}) irreducible",
            verdict.is_irreducible,
            f"{cabled}: {verdict.method.value}",
        )
        cert.notes.append(f"first-order signatures transported: FOS({op.name}) = FOS({base.name})")

    for P in op.submodules:
        if op.cable_p == 1:
            status = is_isotropic(op.module, op.pattern, P)
        else:
            status = isotropy_by_divisibility(op.module, P)
        cert.check(f"{P} isotropic", status != IsotropyStatus.NEITHER, status.value)

    for entry in op.ledger.with_facts(facts):
        if entry.status == FOSStatus.KNOWN_ZERO:
            cert.check(f"{entry.label} ribbon", True, entry.reason)
        elif entry.status == FOSStatus.KNOWN_NONZERO:
            cert.assume(f"{entry.value} != 0 [{entry.nonzero_fact}]", entry.reason)
        else:
            missing = entry.nonzero_fact or "no nonvanishing statement exists"
            cert.check(f"{entry.label} first-order signature nonzero", False, f"missing fact: {missing}")

    cert.conclude("robust")
    if cert.asserted:
        logger.info(f"{op.name}: robust, {len(cert.assumed)} assumed")
    else:
        logger.warning(f"{op.name}: robustness not certified, {len(cert.failed)} failed checks")
    return cert


# Families


@dataclass(frozen=True)
class Family:
    """Operator sequences (innermost first), companions and the knots they build."""

    sequences: list[list[OperatorSpec]]
    companions: list[KnotExpr]
    members: list[KnotExpr]


def cable_family(op: OperatorSpec, p_values: Iterable[int]) -> list[list[OperatorSpec]]:
    return [[cable_operator(op, p)] for p in sorted(set(p_values))]


def theorem_a_family(
    k: int,
    n: int,
    p_values: Iterable[int],
    m_values: Iterable[int],
    companion_j: str = DEFAULT_COMPANION_J,
) -> Family:
    """(R^{k,J})^n applied to twist(2m), then (p, 1)-cabled."""
    if n < 1:
        raise DomainError(f"family depth must be at least 1, got {n}")
    op = operator_r(k, companion_j)
    p_values = sorted(set(p_values))
    companions: list[KnotExpr] = [Twist(2 * m) for m in sorted(set(m_values))]
    sequences = [[op] * (n - 1) + [cable_operator(op, p)] for p in p_values]
    members = []
    for p in p_values:
        for companion in companions:
            member = infect_times(op, companion, n)
            members.append(member if p == 1 else Cable(member, p))
    return Family(sequences, companions, members)


def _sequence_label(sequence: Sequence[OperatorSpec]) -> str:
    return " . ".join(op.name for op in reversed(sequence))


def _level_word(n: int) -> str:
    return f"C/(F_{n}.5 + B_{n + 1})"


def independence_report(
    sequences: Sequence[Sequence[OperatorSpec]],
    companions: Sequence[KnotExpr],
    facts: Optional[FactBook] = None,
    relation_search: bool = True,
) -> Certificate:
    """
    Linear independence of {R^i(K_j)} modulo F_{n.5} + B_{n+1}.

    Sequences are given innermost operator first. Distinct sequences must be
    pairwise strongly coprime, every operator robust, and no rational
    combination of the companions' rho_0 may land in the span of the
    innermost operator's first-order signatures.
    """
    facts = facts or FactBook.empty()
    if not sequences or not companions:
        cert = Certificate(claim="the empty family is linearly independent")
        cert.notes.append("trivial family: nothing to check")
        return cert.conclude("vacuous")

    depths = {len(sequence) for sequence in sequences}
    if len(depths) != 1 or 0 in depths:
        raise DomainError(f"sequence depths differ: {sorted(depths)}")
    n = depths.pop()
    count = len(sequences) * len(companions)
    cert = Certificate(claim=f"{count} knots are linearly independent in {_level_word(n)}")

    polynomials = [[op.alexander for op in reversed(sequence)] for sequence in sequences]
    for i in range(len(sequences)):
        for j in range(i + 1, len(sequences)):
            verdict = sequences_strongly_coprime(polynomials[i], polynomials[j])
            detail = f"{verdict.status.value} at entry {verdict.index}"
            if verdict.resultant is not None:
                detail += f", resultant {verdict.resultant}"
            cert.check(
                f"strongly coprime: {_sequence_label(sequences[i])} vs {_sequence_label(sequences[j])}",
                verdict.status == CoprimalityStatus.STRONGLY_COPRIME,
                detail,
            )

    seen: set[str] = set()
    for sequence in sequences:
        for op in sequence:
            if op.name not in seen:
                seen.add(op.name)
                cert.absorb(robustness_check(op, facts), prefix=f"{op.name}: ")

    labels = [companion.label for companion in companions]
    for companion in companions:
        arf_value = eval_invariants(companion, facts).arf
        cert.check(f"{companion.label} in F_0", arf_value == 0, f"Arf = {arf_value}")
    for fos_name in sorted({sequence[0].fos_name for sequence in sequences}):
        statement = f"rho0-span-avoids-fos {{{', '.join(labels)}}} {fos_name}"
        fact = facts.find(statement)
        if fact is None:
            cert.check(f"rho0 of companions outside span FOS {fos_name}", False, f"missing fact: {statement}")
        else:
            cert.assume(statement, fact.citation)

    if relation_search and len(companions) > 1:
        if len(companions) > get_settings().relation_max_values:
            cert.notes.append("relation search skipped: family larger than the search limit")
        else:
            values = [
                CertifiedReal.from_rho(eval_invariants(c, facts).rho0, c.label) for c in companions
            ]
            relation = small_relation_search(values, RELATION_COEFF_BOUND, RELATION_PRECISION)
            cert.check(
                "no small integer relation among companion rho0",
                relation is None,
                f"|c| <= {RELATION_COEFF_BOUND}, precision 1e-30"
                + ("" if relation is None else f", found {relation}"),
            )

    cert.notes.append(
        "condition on companions: no nontrivial rational combination of their rho0 "
        "lies in the span of the first-order signatures"
    )
    cert.notes.append(f"corollary: independent in F_{n}/F_{n}.5 for members in F_{n}")
    if n >= 1:
        cert.notes.append(f"corollary: independent in B_{n - 1}/B_{n + 1} for members in B_{n - 1}")
    cert.conclude(f"linearly independent in {_level_word(n)}")
    if cert.asserted:
        logger.info(f"Independence certified for {count} knots at depth {n}")
    else:
        logger.warning(f"Independence not certified: {len(cert.failed)} failed checks")
    return cert


# Filtrations


@dataclass(frozen=True)
class Levels:
    """Best certified n for F_n, P_n and N_n; ABSENT when none, INF when slice."""

    solvable: Level
    positive: Level
    negative: Level

    @property
    def bipolar(self) -> Level:
        return min(self.positive, self.negative)

    def names(self) -> list[str]:
        found = [
            _name("F", self.solvable),
            _name("P", self.positive),
            _name("N", self.negative),
            _name("B", self.bipolar),
        ]
        return [name for name in found if name]


def _name(prefix: str, level: Level) -> str:
    if level == INF:
        return f"{prefix}_inf"
    if level < 0:
        return ""
    level = Fraction(level)
    if level.denominator == 1:
        return f"{prefix}_{level.numerator}"
    return f"{prefix}_{math.floor(level)}.5"


def _raise(level: Level) -> Level:
    return level if level == INF else (ABSENT if level < 0 else level + 1)


def _leaf(
    cert: Certificate,
    label: str,
    matrix: SeifertMatrix,
    positive: bool,
    negative: bool,
    note: str,
    facts: FactBook,
) -> Levels:
    values = eval_invariants(Base(label, matrix))
    if values.alexander == LaurentPoly.one():
        cert.assume(f"{label} has Alexander polynomial 1, so it is topologically slice", "Freedman 1982")
        solvable: Level = INF
    elif is_algebraically_slice_genus_one(matrix):
        cert.check(f"{label} algebraically slice", True, "derivative class on a genus-one surface")
        solvable = Fraction(1, 2)
    elif values.arf == 0:
        cert.check(f"Arf({label}) = 0", True, "membership in F_0")
        solvable = 0
    else:
        solvable = ABSENT
    positive_level, negative_level = ABSENT, ABSENT
    for sign, flag in (("P", positive), ("N", negative)):
        fact = facts.find(f"in {sign}0 {label}")
        if flag:
            cert.assume(f"{label} in {sign}_0: {note}", CROSSING_CITATION)
        elif fact is not None:
            cert.assume(f"{label} in {sign}_0", fact.citation)
        else:
            continue
        if sign == "P":
            positive_level = 0
        else:
            negative_level = 0
    return Levels(solvable, positive_level, negative_level)


def _levels(e: KnotExpr, cert: Certificate, facts: FactBook) -> Levels:
    match e:
        case Unknot():
            levels = Levels(INF, INF, INF)
        case Twist(j=j):
            levels = _leaf(
                cert, e.label, twist(j), True, False, "undoing one positive crossing unknots it", facts
            )
        case Base():
            levels = _leaf(cert, e.label, e.matrix, e.positive, e.negative, e.note, facts)
        case Sum(terms=terms):
            parts = [_levels(term, cert, facts) for term in terms]
            levels = Levels(
                min(part.solvable for part in parts),
                min(part.positive for part in parts),
                min(part.negative for part in parts),
            )
        case MirrorReverse(expr=inner):
            part = _levels(inner, cert, facts)
            levels = Levels(part.solvable, part.negative, part.positive)
        case Cable(expr=inner, p=p, q=q):
            if q != 1:
                raise UnsupportedError(f"only (p, 1) cables are supported, got ({p}, {q})")
            levels = _levels(inner, cert, facts)
            cert.assume(
                "(p, 1) cabling preserves every solvable and bipolar level",
                "satellite along the (p, 1) cable pattern, itself unknotted in S^3",
            )
        case Infect(op=op, companion=companion):
            levels = _infect_levels(e, op, _levels(companion, cert, facts), cert, facts)
        case _:
            raise DomainError(f"not a knot expression: {e!r}")
    names = levels.names()
    cert.notes.append(f"{e.label}: {', '.join(names) if names else 'no level'}")
    return levels


def _infect_levels(
    e: Infect, op: OperatorSpec, inner: Levels, cert: Certificate, facts: FactBook
) -> Levels:
    cert.check(f"{op.name} pattern ribbon", True, "ribbon pattern, winding number 0")
    if inner.solvable >= 0:
        cert.assume(
            "infection along a winding-zero curve on a ribbon knot raises F_n, P_n and N_n by one",
            SATELLITE_CITATION,
        )
        solvable = inner.solvable if inner.solvable == INF else math.floor(inner.solvable) + 1
    else:
        cert.assume(
            "a winding-zero satellite has the algebraic concordance class of its pattern",
            "Litherland 1979",
        )
        solvable = Fraction(1, 2)
    positive, negative = _raise(inner.positive), _raise(inner.negative)
    if op.family == "R" and op.cable_p == 1 and op.companion_j:
        j_levels = _levels(base_knot(op.companion_j), cert, facts)
        if j_levels.negative >= 0 and negative < 0:
            cert.assume(
                f"{op.k + 1} negative crossing changes turn {e.label} into an eta-infection "
                f"by {op.companion_j}; with {op.companion_j} in N_0 this gives N_0",
                CROSSING_CITATION,
            )
            negative = 0
    return Levels(solvable, positive, negative)


def filtration_certify(e: KnotExpr, facts: Optional[FactBook] = None) -> Certificate:
    cert = Certificate(claim=f"filtration levels of {e.label}")
    levels = _levels(e, cert, facts or FactBook.empty())
    cert.levels = levels.names()
    if cert.levels:
        conclusion = f"{e.label} in {' ∩ '.join(cert.levels)}"
    else:
        conclusion = f"{e.label}: no level certified"
    cert.conclude(conclusion)
    logger.info(conclusion)
    return cert


# Kauffman derivative curves


def derivative_curves(L: KnotExpr) -> tuple[KnotExpr, KnotExpr]:
    """d = L # -(L_{2,1}) and d' = T # L # -L."""
    d = Sum((L, MirrorReverse(Cable(L, 2))))
    d_prime = Sum((base_knot("trefoil"), L, MirrorReverse(L)))
    return d, d_prime


def kauffman_suite(
    facts: Optional[FactBook] = None, k: int = 1, n: int = 1, m: int = 1
) -> Certificate:
    facts = facts or FactBook.empty()
    family = theorem_a_family(k, n, [1, 2], [m])
    double = base_knot("whitehead-double")
    samples = [base_knot("trefoil"), Twist(2), base_knot("figure-eight"), double, family.members[0]]
    cert = Certificate(claim="derivative curves d, d' on a genus-one slice surface are not both slice")

    for L in samples:
        d, d_prime = derivative_curves(L)
        arf_value = eval_invariants(d_prime, facts).arf
        cert.check(f"Arf(d') = 1 for L = {L.label}", arf_value == 1, f"d' = {d_prime.label}")

    d, _ = derivative_curves(double)
    values = eval_invariants(d, facts)
    cert.check("Alexander polynomial of d is 1", values.alexander == LaurentPoly.one(), str(values.alexander))
    cert.notes.append(f"{d.label} is topologically slice (Alexander polynomial 1)")
    for label in (double.label, Cable(double, 2).label):
        found = facts.tau(label)
        if found is not None:
            cert.assume(f"tau {label} = {found[0]}", found[1].citation)
    exact = values.tau.exact if values.tau is not None else None
    cert.check("tau(d) = -1", exact == -1, f"tau bounds {values.tau}")

    L = family.members[0]
    report = independence_report(family.sequences, family.companions, facts, relation_search=False)
    cert.absorb(report, prefix="independence: ")
    if report.asserted:
        cert.notes.append(
            f"d = {L.label} # -({L.label})_(2,1) is nontrivial in F_{n}/F_{n}.5: "
            f"L and L_(2,1) are independent"
        )

    genus_one = eval_invariants(double, facts)
    fact = facts.find("upsilon-summand genus-one tau-one")
    if fact is not None and genus_one.genus_upper == 1 and genus_one.tau and genus_one.tau.exact == 1:
        cert.assume("upsilon-summand genus-one tau-one", fact.citation)
        cert.notes.append(
            f"the (2^j, 1) cables of {double.label} span an infinite-rank summand (genus one, tau = 1)"
        )

    cert.conclude("Arf(d') = 1 for every L; for the Whitehead double d is topologically slice with tau(d) = -1")
    logger.info(f"Kauffman suite: {len(cert.verified)} verified, {len(cert.failed)} failed")
    return cert
