"""
Cyclic rational Alexander modules Q[t, t^-1] / <delta(t) delta(t^-1)>.

Submodules are principal, indexed by divisors of Delta, and stored as the
normalized gcd of a generator with Delta. The Blanchfield pairing is computed
from a Seifert matrix through the presentation tV - V^T:

    Bl(x, y) = (1 - t) conj(y)^T (tV - V^T)^-1 x   mod Q[t, t^-1]
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence, Union

from sympy import Matrix, Poly

from app.services.laurent import T, LaurentPoly, associated, gcd, normalize
from app.services.laurent import substitute_power
from app.services.primality import is_irreducible
from app.services.seifert import SeifertMatrix, alexander_polynomial, operator_r
from app.utils.constants import DELTA_BAR_SUBMODULE, DELTA_SUBMODULE, ZERO_SUBMODULE
from app.utils.errors import DomainError
from app.utils.global_logging import get_logger
from app.utils.types import (
    BlanchfieldConvention,
    CyclicAlexModule,
    IsotropyStatus,
    Submodule,
)

logger = get_logger(__name__)

Element = Union[LaurentPoly, int]


def _poly(value: Element) -> LaurentPoly:
    return value if isinstance(value, LaurentPoly) else LaurentPoly.constant(value)


def lcm(f: LaurentPoly, g: LaurentPoly) -> LaurentPoly:
    return normalize((f * g).exact_divide(gcd(f, g)))


# Modules and submodules


def cyclic_module(delta_factor: LaurentPoly, generator_name: str = "alpha") -> CyclicAlexModule:
    delta_factor = normalize(delta_factor)
    robust = is_irreducible(delta_factor).is_irreducible
    if not robust:
        logger.warning(f"{delta_factor} is reducible; module is not of robust type")
    return CyclicAlexModule(
        delta_factor=delta_factor, generator_name=generator_name, robust_type=robust
    )


def delta_k(k: int) -> LaurentPoly:
    """delta_k(t) = kt - (k + 1)."""
    t = LaurentPoly.t()
    return k * t - (k + 1)


def operator_module(k: int) -> CyclicAlexModule:
    """The module of R^{k,J} and Q^k, generated by alpha_k."""
    if k < 1:
        raise DomainError(f"operator needs k >= 1, got {k}")
    return cyclic_module(delta_k(k), f"alpha_{k}")


def _label(M: CyclicAlexModule, generator: LaurentPoly) -> str:
    if generator == M.delta:
        return ZERO_SUBMODULE
    if associated(generator, M.delta_factor):
        return DELTA_SUBMODULE
    if associated(generator, M.delta_factor.reciprocal()):
        return DELTA_BAR_SUBMODULE
    return f"<{generator.render()}>"


def submodule(
    M: CyclicAlexModule,
    element: Element,
    ribbon: bool = False,
    ribbon_note: str = "",
) -> Submodule:
    """The submodule generated by an element, reduced to gcd(element, Delta)."""
    generator = gcd(_poly(element), M.delta)
    return Submodule(
        generator=generator,
        label=_label(M, generator),
        ribbon=ribbon,
        ribbon_note=ribbon_note,
    )


def zero_submodule(M: CyclicAlexModule) -> Submodule:
    return submodule(M, 0)


def proper_submodules(M: CyclicAlexModule) -> list[Submodule]:
    """<0>, <delta(t)> and <delta(t^-1)>; the last two coincide when delta is symmetric."""
    if not M.robust_type:
        raise DomainError("not a robust-type module")
    result = [zero_submodule(M), submodule(M, M.delta_factor)]
    bar = submodule(M, M.delta_factor.reciprocal())
    if bar.generator != result[1].generator:
        result.append(bar)
    return result


def is_contained(P: Submodule, Q: Submodule) -> bool:
    """<p> is inside <q> iff q divides p."""
    return Q.generator.divides(P.generator)


def intersection(M: CyclicAlexModule, P: Submodule, Q: Submodule) -> Submodule:
    return submodule(M, lcm(P.generator, Q.generator))


def contains(M: CyclicAlexModule, P: Submodule, element: Element) -> bool:
    residue = _poly(element) % M.delta if M.delta.span else LaurentPoly.zero()
    return residue.is_zero or P.generator.divides(residue)


# Presentation by tV - V^T


def _presentation(V: SeifertMatrix) -> tuple[list[list[LaurentPoly]], LaurentPoly]:
    """adj(tV - V^T) and det(tV - V^T) with Laurent entries."""
    if V.size == 0:
        raise DomainError("the trivial module has no presentation")
    M = T * Matrix(V.matrix) - Matrix(V.matrix).T
    det = LaurentPoly.from_poly(Poly(M.det(method="berkowitz"), T))
    if det.is_zero:
        raise DomainError("Alexander polynomial vanishes")
    adj = M.adjugate()
    entries = [
        [LaurentPoly.from_poly(Poly(adj[i, j], T)) for j in range(V.size)]
        for i in range(V.size)
    ]
    return entries, det


def _solve(V: SeifertMatrix, x: Sequence[Element]) -> tuple[list[LaurentPoly], LaurentPoly]:
    """Numerators of (tV - V^T)^-1 x over the common denominator det."""
    if len(x) != V.size:
        raise DomainError(f"expected a vector of length {V.size}, got {len(x)}")
    adj, det = _presentation(V)
    vector = [_poly(entry) for entry in x]
    numerators = []
    for row in adj:
        total = LaurentPoly.zero()
        for a, b in zip(row, vector):
            total = total + a * b
        numerators.append(total)
    return numerators, det


def annihilator(V: SeifertMatrix, x: Sequence[Element]) -> LaurentPoly:
    """Normalized order of the class of x in the module presented by tV - V^T."""
    numerators, det = _solve(V, x)
    order = LaurentPoly.one()
    for numerator in numerators:
        if numerator.is_zero:
            continue
        order = lcm(order, det.exact_divide(gcd(numerator, det)))
    return order


def _check_presents(M: CyclicAlexModule, V: SeifertMatrix):
    if alexander_polynomial(V) != M.delta:
        raise DomainError(
            f"Seifert matrix has Alexander polynomial {alexander_polynomial(V)}, "
            f"module has order {M.delta}"
        )


def band_vector_submodule(
    M: CyclicAlexModule, V: SeifertMatrix, surface_class: Sequence[int]
) -> Submodule:
    """
    The submodule generated by a Seifert surface class c, lifted as (V - V^T)c.

    Its generator is Delta divided by the annihilator of the lift.
    """
    _check_presents(M, V)
    c = Matrix(list(surface_class))
    lift = (Matrix(V.matrix) - Matrix(V.matrix).T) * c
    order = annihilator(V, [int(entry) for entry in lift])
    return submodule(M, M.delta.exact_divide(order))


def cyclic_generator(V: SeifertMatrix) -> list[int]:
    """An integer vector whose class generates the presented module."""
    target = alexander_polynomial(V)
    size = V.size
    basis = [[1 if i == j else 0 for j in range(size)] for i in range(size)]
    candidates = list(basis)
    for a, b in combinations(basis, 2):
        candidates.append([x + y for x, y in zip(a, b)])
        candidates.append([x - y for x, y in zip(a, b)])
    for vector in candidates:
        if annihilator(V, vector) == target:
            return vector
    raise DomainError("module is not cyclic on the small candidate generators")


# Blanchfield pairing


@dataclass(frozen=True)
class BlanchfieldValue:
    """numerator / denominator modulo Q[t, t^-1], with coprime parts."""

    numerator: LaurentPoly
    denominator: LaurentPoly = field(default_factory=LaurentPoly.one)

    @classmethod
    def reduced(cls, numerator: LaurentPoly, denominator: LaurentPoly) -> BlanchfieldValue:
        if denominator.is_zero:
            raise DomainError("Alexander polynomial vanishes")
        if numerator.is_zero:
            return cls(LaurentPoly.zero())
        common = gcd(numerator, denominator)
        numerator = numerator.exact_divide(common)
        denominator = denominator.exact_divide(common)
        canonical = normalize(denominator)
        numerator = numerator * canonical.exact_divide(denominator)
        if canonical.span == 0:
            return cls(LaurentPoly.zero())
        remainder = numerator % canonical
        if remainder.is_zero:
            return cls(LaurentPoly.zero())
        return cls(remainder, canonical)

    @property
    def is_zero(self) -> bool:
        return self.numerator.is_zero

    def conjugate(self) -> BlanchfieldValue:
        return BlanchfieldValue.reduced(
            self.numerator.reciprocal(), self.denominator.reciprocal()
        )

    def __sub__(self, other: BlanchfieldValue) -> BlanchfieldValue:
        return BlanchfieldValue.reduced(
            self.numerator * other.denominator - other.numerator * self.denominator,
            self.denominator * other.denominator,
        )

    def scaled(self, factor: LaurentPoly) -> BlanchfieldValue:
        return BlanchfieldValue.reduced(self.numerator * factor, self.denominator)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        return f"({self.numerator.render()}) / ({self.denominator.render()})"


def blanchfield_pairing(
    V: SeifertMatrix,
    x: Sequence[Element],
    y: Sequence[Element],
    convention: BlanchfieldConvention = BlanchfieldConvention.ONE_MINUS_T,
) -> BlanchfieldValue:
    """
    Bl(x, y) = (1 - t) conj(y)^T (tV - V^T)^-1 x mod Q[t, t^-1], linear in x
    and conjugate linear in y.

    The scalar (1 - t) is the fixed convention; T_MINUS_ONE uses (t - 1).
    Orthogonal complements, hence isotropy verdicts, agree under both.
    """
    numerators, det = _solve(V, x)
    scalar = LaurentPoly.one() - LaurentPoly.t()
    if convention == BlanchfieldConvention.T_MINUS_ONE:
        scalar = -scalar
    total = LaurentPoly.zero()
    for y_i, n_i in zip(y, numerators):
        total = total + _poly(y_i).reciprocal() * n_i
    return BlanchfieldValue.reduced(scalar * total, det)


def orthogonal_complement(
    M: CyclicAlexModule,
    V: SeifertMatrix,
    P: Submodule,
    convention: BlanchfieldConvention = BlanchfieldConvention.ONE_MINUS_T,
) -> Submodule:
    """P-perp computed from the pairing of a cyclic generator with itself."""
    _check_presents(M, V)
    g = cyclic_generator(V)
    b = blanchfield_pairing(V, g, g, convention)
    if b.is_zero:
        return submodule(M, 1)
    quotient = b.denominator.exact_divide(gcd(b.denominator, P.generator))
    return submodule(M, normalize(quotient.reciprocal()))


def orthogonal_by_divisibility(M: CyclicAlexModule, P: Submodule) -> Submodule:
    """P-perp for a nondegenerate pairing: <delta/p> perp is <reciprocal(Delta / p)>."""
    return submodule(M, normalize(M.delta.exact_divide(P.generator).reciprocal()))


def _classify(P: Submodule, perp: Submodule) -> IsotropyStatus:
    if P.generator == perp.generator:
        return IsotropyStatus.LAGRANGIAN
    if is_contained(P, perp):
        return IsotropyStatus.ISOTROPIC
    return IsotropyStatus.NEITHER


def is_isotropic(
    M: CyclicAlexModule,
    V: SeifertMatrix,
    P: Submodule,
    convention: BlanchfieldConvention = BlanchfieldConvention.ONE_MINUS_T,
) -> IsotropyStatus:
    status = _classify(P, orthogonal_complement(M, V, P, convention))
    logger.debug(f"{P} in module of order {M.delta}: {status.value}")
    return status


def isotropy_by_divisibility(M: CyclicAlexModule, P: Submodule) -> IsotropyStatus:
    return _classify(P, orthogonal_by_divisibility(M, P))


# Cables


@dataclass(frozen=True)
class CabledModule:
    module: CyclicAlexModule
    submodules: list[Submodule]
    p: int


def transport(M: CyclicAlexModule, P: Submodule, p: int) -> Submodule:
    """<g(t)> goes to <g(s^p)>; ribbon markers travel with it."""
    return submodule(M, substitute_power(P.generator, p), P.ribbon, P.ribbon_note)


def cable_module(
    M: CyclicAlexModule, p: int, submodules: Optional[Sequence[Submodule]] = None
) -> CabledModule:
    """A(K) tensored up along s -> s^p: order Delta(s^p) and factor delta(s^p)."""
    if p < 1:
        raise DomainError(f"cable parameter must be positive, got {p}")
    if p == 1:
        carried = list(submodules) if submodules is not None else proper_submodules(M)
        return CabledModule(M, carried, 1)
    cabled = cyclic_module(substitute_power(M.delta_factor, p), f"{M.generator_name}_{p}")
    if submodules is None:
        submodules = proper_submodules(M) if M.robust_type else [zero_submodule(M)]
    carried = [transport(cabled, P, p) for P in submodules]
    return CabledModule(cabled, carried, p)


def beta_relation_check(k: int) -> bool:
    """
    Check, in the module presented by tV - V^T for R^k, that alpha_k generates
    and beta_k = +-k(1 - t) alpha_k.
    """
    if k < 1:
        raise DomainError(f"operator needs k >= 1, got {k}")
    V = operator_r(k)
    delta = alexander_polynomial(V)
    if annihilator(V, [1, 0]) != delta:
        return False
    one_minus_t = LaurentPoly.one() - LaurentPoly.t()
    for sign in (1, -1):
        difference = [-sign * k * one_minus_t, LaurentPoly.one()]
        if annihilator(V, difference) == LaurentPoly.one():
            logger.debug(f"beta_{k} = {sign * k}(1 - t) alpha_{k}")
            return True
    return False
