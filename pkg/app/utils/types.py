from enum import Enum
from fractions import Fraction
from typing import Annotated, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, WithJsonSchema

from app.services.laurent import LaurentPoly, normalize, render_rational

# LaurentPoly and Fraction values serialise to their canonical text
PolyField = Annotated[
    LaurentPoly,
    PlainSerializer(lambda p: p.render(), return_type=str),
    WithJsonSchema({"type": "string"}),
]
RationalField = Annotated[
    Fraction,
    PlainSerializer(render_rational, return_type=str),
    WithJsonSchema({"type": "string"}),
]


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# Primality


class IrreducibilityStatus(str, Enum):
    IRREDUCIBLE = "Irreducible"
    REDUCIBLE = "Reducible"
    UNIT = "Unit"


class IrreducibilityMethod(str, Enum):
    UNIT = "Unit"
    DEGREE_ONE = "DegreeOne"
    RATIONAL_ROOT = "RationalRoot"
    EISENSTEIN = "EisensteinCriterion"
    BONCIOCAT = "BonciocatCriterion"
    EXHAUSTIVE = "ExhaustiveFactorSearch"


class IrreducibilityVerdict(FrozenModel):
    polynomial: PolyField = Field(..., description="The normalized input")
    status: IrreducibilityStatus
    method: IrreducibilityMethod
    witness: Optional[PolyField] = Field(
        default=None, description="A proper factor dividing the input exactly"
    )
    detail: str = Field(default="", description="Human readable trace")

    @property
    def is_irreducible(self) -> bool:
        return self.status == IrreducibilityStatus.IRREDUCIBLE


class BonciocatResult(FrozenModel):
    status: Literal["Irreducible", "Inconclusive"]
    primes: tuple[int, int]
    alphas: Optional[tuple[int, int]] = None
    reason: str = ""


class StrongPrimalityStatus(str, Enum):
    STRONGLY_PRIME = "StronglyPrime"
    NOT_STRONGLY_PRIME = "NotStronglyPrime"
    UNKNOWN = "Unknown"


class StrongPrimalityVerdict(FrozenModel):
    polynomial: PolyField
    status: StrongPrimalityStatus
    witness_k: Optional[int] = Field(
        default=None, description="k with f(t^k) reducible"
    )
    certificate: list[str] = Field(
        default_factory=list, description="Criteria applied, in order"
    )


class CoprimalityStatus(str, Enum):
    STRONGLY_COPRIME = "StronglyCoprime"
    NOT_STRONGLY_COPRIME = "NotStronglyCoprime"
    UNKNOWN = "Unknown"


class CoprimalityVerdict(FrozenModel):
    status: CoprimalityStatus
    witness: Optional[tuple[int, int]] = Field(
        default=None, description="(k, l) with gcd(p(t^k), q(t^l)) nontrivial"
    )
    index: Optional[int] = Field(
        default=None, description="1-based sequence entry the verdict rests on"
    )
    resultant: Optional[RationalField] = Field(
        default=None, description="Nonzero resultant certifying plain coprimality"
    )
    detail: str = ""


# Seifert forms


class DerivativeClass(FrozenModel):
    """A primitive class (x, y) on a genus-one surface with vanishing self-linking."""

    x: int
    y: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.x, self.y)

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


# Alexander modules


class IsotropyStatus(str, Enum):
    ISOTROPIC = "Isotropic"
    LAGRANGIAN = "Lagrangian"
    NEITHER = "Neither"


class BlanchfieldConvention(str, Enum):
    """Scalar in front of V^T (tV - V^T)^-1 in the pairing formula."""

    ONE_MINUS_T = "1-t"
    T_MINUS_ONE = "t-1"


class CyclicAlexModule(FrozenModel):
    """Q[t, t^-1] / <delta(t) delta(t^-1)> with a named cyclic generator."""

    delta_factor: PolyField = Field(..., description="The prime factor delta(t)")
    generator_name: str = Field(default="alpha", description="Label of the generator")
    robust_type: bool = Field(
        default=True, description="False when delta_factor is not irreducible"
    )

    @property
    def delta(self) -> LaurentPoly:
        return normalize(self.delta_factor * self.delta_factor.reciprocal())


class Submodule(FrozenModel):
    """<generator> inside a cyclic module; generator is gcd(g, Delta), normalized."""

    generator: PolyField
    label: str = ""
    ribbon: bool = Field(
        default=False, description="Marked as coming from a ribbon disk"
    )
    ribbon_note: str = ""

    def __str__(self) -> str:
        return self.label or f"<{self.generator.render()}>"


# Legendrian fronts


class LegInvariants(FrozenModel):
    tb: int = Field(..., description="Thurston-Bennequin number")
    rot: int = Field(..., description="Rotation number")

    def __str__(self) -> str:
        return f"tb = {self.tb}, rot = {self.rot}"


class TauBounds(FrozenModel):
    """Plamenevskaya lower bound against a Seifert genus upper bound."""

    lower: int
    upper: int
    exact: Optional[int] = Field(default=None, description="Set when lower == upper")


# Certificates and reports


class Fact(FrozenModel):
    """One cited hypothesis from a facts file; ``statement`` may hold wildcards."""

    statement: str = Field(..., description="Statement id, fnmatch patterns allowed")
    citation: str = Field(..., description="Where the statement is proved")
    line: int = Field(default=0, description="Line in the facts file, 0 when built in")


class Check(FrozenModel):
    name: str
    passed: bool
    detail: str = ""


class Assumption(FrozenModel):
    statement: str
    citation: str


class Certificate(BaseModel):
    """A conclusion with an explicit split into machine-checked and assumed content."""

    claim: str = Field(..., description="The statement the certificate argues for")
    conclusion: Optional[str] = Field(
        default=None, description="Set only when no check failed"
    )
    verified: list[Check] = Field(default_factory=list)
    assumed: list[Assumption] = Field(default_factory=list)
    failed: list[Check] = Field(default_factory=list)
    levels: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)

    @property
    def asserted(self) -> bool:
        return self.conclusion is not None

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        entry = Check(name=name, passed=passed, detail=detail)
        (self.verified if passed else self.failed).append(entry)
        return passed

    def assume(self, statement: str, citation: str):
        if all(a.statement != statement for a in self.assumed):
            self.assumed.append(Assumption(statement=statement, citation=citation))

    def absorb(self, other: "Certificate", prefix: str = ""):
        """Merge another certificate's checks and assumptions under a prefix."""
        for item in other.verified:
            self.verified.append(item.model_copy(update={"name": prefix + item.name}))
        for item in other.failed:
            self.failed.append(item.model_copy(update={"name": prefix + item.name}))
        for item in other.assumed:
            self.assume(item.statement, item.citation)

    def conclude(self, conclusion: str) -> "Certificate":
        self.conclusion = None if self.failed else conclusion
        return self


class ProfileRow(FrozenModel):
    start: str = Field(..., description="Arc start as theta/pi")
    end: str = Field(..., description="Arc end as theta/pi")
    level: int


class InvariantReport(FrozenModel):
    expression: str
    alexander: PolyField
    arf: int
    genus_upper: Optional[int] = None
    signature: int = Field(..., description="Signature at w = -1")
    profile: list[ProfileRow] = Field(default_factory=list)
    rho0_symbolic: str
    rho0_interval: tuple[str, str]
    tau: Optional[TauBounds] = None
    legendrian: Optional[LegInvariants] = None
    first_order: list[str] = Field(
        default_factory=list, description="First-order signatures of an outer infection"
    )
