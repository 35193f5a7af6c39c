"""
Doubling operators and the bookkeeping of their first-order signatures.

A first-order signature is never evaluated. It is a formal atom
``fos(<operator>, <submodule>)`` whose status is known zero (the submodule
comes from a ribbon disk), known nonzero (a cited fact says so) or formal.
Infection adds ``rho0(<companion>)`` exactly when the infection axis lies
outside the submodule.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Iterator, Optional, Union

from app.services import seifert
from app.services.alexmodule import cable_module, contains, operator_module
from app.services.alexmodule import proper_submodules, submodule
from app.services.laurent import LaurentPoly, normalize, render_rational
from app.services.laurent import substitute_power
from app.services.seifert import SeifertMatrix
from app.utils.constants import DELTA_BAR_SUBMODULE, DELTA_SUBMODULE, ZERO_SUBMODULE
from app.utils.errors import DomainError
from app.utils.global_logging import get_logger
from app.utils.types import CyclicAlexModule, Submodule

if TYPE_CHECKING:
    from app.services.facts import FactBook

logger = get_logger(__name__)

DEFAULT_COMPANION_J = "neg-trefoils-3"


# Formal values


@dataclass(frozen=True, order=True)
class RhoAtom:
    kind: str
    name: str
    submodule: str = ""

    def __post_init__(self):
        if self.kind not in ("fos", "rho0"):
            raise DomainError(f"unknown rho atom kind {self.kind!r}")

    @classmethod
    def rho0(cls, knot: str) -> RhoAtom:
        return cls("rho0", knot)

    @classmethod
    def fos(cls, operator: str, label: str) -> RhoAtom:
        return cls("fos", operator, label)

    def __str__(self) -> str:
        if self.kind == "rho0":
            return f"rho0({self.name})"
        return f"fos({self.name}, {self.submodule})"


class RhoExpr:
    """A rational combination of atoms plus a constant, kept in sorted form."""

    __slots__ = ("_terms", "_constant")

    def __init__(self, terms: Optional[dict[RhoAtom, Fraction]] = None, constant=0):
        cleaned = {a: Fraction(c) for a, c in (terms or {}).items() if c != 0}
        self._terms = tuple(sorted(cleaned.items()))
        self._constant = Fraction(constant)

    @classmethod
    def zero(cls) -> RhoExpr:
        return cls()

    @classmethod
    def atom(cls, atom: RhoAtom, coeff=1) -> RhoExpr:
        return cls({atom: Fraction(coeff)})

    @property
    def terms(self) -> dict[RhoAtom, Fraction]:
        return dict(self._terms)

    @property
    def constant(self) -> Fraction:
        return self._constant

    @property
    def atoms(self) -> list[RhoAtom]:
        return [a for a, _ in self._terms]

    @property
    def is_zero(self) -> bool:
        return not self._terms and self._constant == 0

    def __add__(self, other: RhoExpr) -> RhoExpr:
        if not isinstance(other, RhoExpr):
            return NotImplemented
        terms = self.terms
        for a, c in other._terms:
            terms[a] = terms.get(a, Fraction(0)) + c
        return RhoExpr(terms, self._constant + other._constant)

    def __neg__(self) -> RhoExpr:
        return self * -1

    def __sub__(self, other: RhoExpr) -> RhoExpr:
        return self + (-other)

    def __mul__(self, scalar) -> RhoExpr:
        scalar = Fraction(scalar)
        return RhoExpr({a: c * scalar for a, c in self._terms}, self._constant * scalar)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, RhoExpr):
            return NotImplemented
        return self._terms == other._terms and self._constant == other._constant

    def __hash__(self) -> int:
        return hash((self._terms, self._constant))

    def __str__(self) -> str:
        parts: list[tuple[str, str]] = []
        for a, c in self._terms:
            sign = "-" if c < 0 else "+"
            magnitude = abs(c)
            body = str(a) if magnitude == 1 else f"{render_rational(magnitude)}*{a}"
            parts.append((sign, body))
        if self._constant:
            sign = "-" if self._constant < 0 else "+"
            parts.append((sign, render_rational(abs(self._constant))))
        if not parts:
            return "0"
        first_sign, first = parts[0]
        text = f"-{first}" if first_sign == "-" else first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"RhoExpr({str(self)!r})"


# Ledger


class FOSStatus(str, Enum):
    KNOWN_ZERO = "KnownZero"
    KNOWN_NONZERO = "KnownNonzero"
    FORMAL = "Formal"


@dataclass(frozen=True)
class FOSEntry:
    submodule: Submodule
    status: FOSStatus
    value: RhoExpr
    reason: str = ""
    nonzero_fact: Optional[str] = None

    @property
    def label(self) -> str:
        return str(self.submodule)


@dataclass(frozen=True)
class FOSLedger:
    entries: tuple[FOSEntry, ...]

    def __post_init__(self):
        for entry in self.entries:
            ribbon = entry.submodule.ribbon
            if ribbon != (entry.status == FOSStatus.KNOWN_ZERO):
                raise DomainError(
                    f"ledger entry {entry.label}: KnownZero must match a ribbon marker"
                )
            if ribbon and not entry.value.is_zero:
                raise DomainError(f"ledger entry {entry.label}: ribbon value must be 0")

    def __iter__(self) -> Iterator[FOSEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def labels(self) -> list[str]:
        return [entry.label for entry in self.entries]

    def entry(self, label: str) -> FOSEntry:
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise DomainError(f"{label} is not a proper submodule of the pattern module")

    def with_facts(self, facts: FactBook) -> FOSLedger:
        """Promote formal entries whose nonvanishing fact is on file."""
        promoted = []
        for entry in self.entries:
            fact = facts.find(entry.nonzero_fact) if entry.nonzero_fact else None
            if entry.status == FOSStatus.FORMAL and fact is not None:
                entry = replace(entry, status=FOSStatus.KNOWN_NONZERO, reason=fact.citation)
            promoted.append(entry)
        return FOSLedger(tuple(promoted))


# Operators


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """
    A doubling operator R_alpha: ribbon pattern, cyclic module, axis class
    of the infection curve and the ledger of its first-order signatures.
    """

    name: str
    pattern: SeifertMatrix
    module: CyclicAlexModule
    submodules: tuple[Submodule, ...]
    axis: LaurentPoly
    ledger: FOSLedger
    family: str
    k: int
    companion_j: Optional[str] = None
    cable_p: int = 1
    fos_name: str = ""
    front: Optional[str] = None
    genus: Optional[int] = None
    base: Optional[OperatorSpec] = field(default=None, repr=False)

    @property
    def alexander(self) -> LaurentPoly:
        delta = seifert.alexander_polynomial(self.pattern)
        return normalize(substitute_power(delta, self.cable_p))

    @property
    def robust_type(self) -> bool:
        return self.module.robust_type

    @property
    def label(self) -> str:
        if self.family == "Q":
            text = f"Q({self.k})"
        elif self.family == "R":
            text = f"R({self.k}, J='{self.companion_j}')"
        else:
            text = f"R({self.k}, J='U')"
        return text if self.cable_p == 1 else f"{text}_({self.cable_p},1)"

    def submodule(self, label: str) -> Submodule:
        for P in self.submodules:
            if str(P) == label:
                return P
        raise DomainError(f"{label} is not a proper submodule of {self.name}")

    def __str__(self) -> str:
        return self.name


def _marked(M: CyclicAlexModule, ribbon: dict[str, str]) -> tuple[Submodule, ...]:
    marked = []
    for P in proper_submodules(M):
        note = ribbon.get(str(P))
        marked.append(submodule(M, P.generator, ribbon=note is not None, ribbon_note=note or ""))
    return tuple(marked)


def _formal(name: str, P: Submodule, fact: Optional[str] = None) -> FOSEntry:
    if P.ribbon:
        return FOSEntry(P, FOSStatus.KNOWN_ZERO, RhoExpr.zero(), P.ribbon_note)
    return FOSEntry(P, FOSStatus.FORMAL, RhoExpr.atom(RhoAtom.fos(name, str(P))), "", fact)


def operator_q(k: int) -> OperatorSpec:
    """Q^k: both nontrivial submodules bound ribbon disks; <0> is formal."""
    M = operator_module(k)
    cut = "ribbon disk from a band cut"
    submodules = _marked(M, {DELTA_SUBMODULE: cut, DELTA_BAR_SUBMODULE: cut})
    name = f"Q^{k}"
    fact = f"fos-nonzero Q({k}) {ZERO_SUBMODULE}"
    ledger = FOSLedger(tuple(_formal(name, P, fact) for P in submodules))
    return OperatorSpec(
        name=name,
        pattern=seifert.operator_q(k),
        module=M,
        submodules=submodules,
        axis=LaurentPoly.one(),
        ledger=ledger,
        family="Q",
        k=k,
        fos_name=f"Q({k})",
        front="q-front",
        genus=1,
    )


def eta_operator(k: int) -> OperatorSpec:
    """R^{k,U} seen as a pattern for infection along eta, with [eta] = delta_k(t)."""
    M = operator_module(k)
    submodules = _marked(M, {DELTA_SUBMODULE: "ribbon disk containing eta"})
    name = f"R^{{{k},U}}"
    ledger = FOSLedger(tuple(_formal(name, P) for P in submodules))
    return OperatorSpec(
        name=name,
        pattern=seifert.operator_r(k),
        module=M,
        submodules=submodules,
        axis=M.delta_factor,
        ledger=ledger,
        family="eta",
        k=k,
        fos_name=f"R({k},U)",
    )


def _companion_name(companion) -> str:
    return companion if isinstance(companion, str) else companion.label


def rho_ledger_infection(op: OperatorSpec, companion, P: Union[Submodule, str]) -> RhoExpr:
    """The first-order signature of op infected by ``companion`` on the submodule P."""
    label = P if isinstance(P, str) else str(P)
    entry = op.ledger.entry(label)
    value = entry.value
    if not contains(op.module, entry.submodule, op.axis):
        value = value + RhoExpr.atom(RhoAtom.rho0(_companion_name(companion)))
    return value


def operator_r(k: int, companion_j: str = DEFAULT_COMPANION_J) -> OperatorSpec:
    """R^{k,J}: R^{k,U} infected along eta by J; <delta(t)> holds [eta] and is ribbon."""
    eta = eta_operator(k)
    entries = []
    fact = f"rho0-avoids-fos {companion_j} R({k},U)"
    for P in eta.submodules:
        value = rho_ledger_infection(eta, companion_j, P)
        if P.ribbon:
            entries.append(FOSEntry(P, FOSStatus.KNOWN_ZERO, value, P.ribbon_note))
        else:
            entries.append(FOSEntry(P, FOSStatus.FORMAL, value, "", fact))
    return OperatorSpec(
        name=f"R^{{{k},{companion_j}}}",
        pattern=seifert.operator_r(k),
        module=eta.module,
        submodules=eta.submodules,
        axis=LaurentPoly.one(),
        ledger=FOSLedger(tuple(entries)),
        family="R",
        k=k,
        companion_j=companion_j,
        fos_name=eta.fos_name,
    )


def cable_operator(op: OperatorSpec, p: int) -> OperatorSpec:
    """
    The (p, 1) cable R_{p,1} along the image of the axis.

    Submodules are tensored up along s -> s^p and every ledger entry is
    carried over unchanged, so FOS(R_{p,1}) = FOS(R).
    """
    if p < 1:
        raise DomainError(f"cable parameter must be positive, got {p}")
    if p == 1:
        return op
    cabled = cable_module(op.module, p, list(op.submodules))
    carried = dict(zip((str(P) for P in op.submodules), cabled.submodules))
    entries = tuple(replace(entry, submodule=carried[entry.label]) for entry in op.ledger)
    if not cabled.module.robust_type:
        logger.warning(f"{op.name} cabled with p = {p} is not of robust type")
    return OperatorSpec(
        name=f"{op.name}_{{{p},1}}",
        pattern=op.pattern,
        module=cabled.module,
        submodules=tuple(cabled.submodules),
        axis=substitute_power(op.axis, p),
        ledger=FOSLedger(entries),
        family=op.family,
        k=op.k,
        companion_j=op.companion_j,
        cable_p=op.cable_p * p,
        fos_name=op.fos_name,
        genus=op.genus * p if op.genus is not None else None,
        base=op.base or op,
    )


def operator_by_name(name: str, k: int, companion_j: str = DEFAULT_COMPANION_J) -> OperatorSpec:
    """Look up ``Q`` or ``R`` by its command-line name."""
    if k < 1:
        raise DomainError(f"operator parameter k must be positive, got {k}")
    match name.upper():
        case "Q":
            return operator_q(k)
        case "R":
            return operator_r(k, companion_j)
    raise DomainError(f"unknown operator {name!r}; choose Q or R")
