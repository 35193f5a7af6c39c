"""
Seifert matrices and the classical invariants read off them.

A Seifert matrix V is a 2g x 2g integer matrix with det(V - V^T) = 1. The
Alexander polynomial, Levine-Tristram signatures, the Arf invariant and the
derivative classes of a genus-one surface are all computed exactly with sympy.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

from sympy import ImmutableMatrix, Matrix, Poly, Rational, Symbol, diag, integer_nthroot

from app.services.laurent import T, LaurentPoly, normalize
from app.utils.errors import DomainError, ParseError
from app.utils.global_logging import get_logger
from app.utils.types import DerivativeClass

logger = get_logger(__name__)

X = Symbol("x")

CircleParameter = Optional[Fraction]


class SeifertMatrix:
    """An immutable Seifert matrix; the genus is half the dimension."""

    __slots__ = ("_rows", "_matrix")

    def __init__(self, rows: Iterable[Sequence[int]] = ()):
        rows = tuple(tuple(int(entry) for entry in row) for row in rows)
        size = len(rows)
        if any(len(row) != size for row in rows):
            raise DomainError("not a Seifert matrix: entries must form a square matrix")
        if size % 2:
            raise DomainError("not a Seifert matrix: dimension must be even")
        self._rows = rows
        self._matrix = ImmutableMatrix(rows) if size else ImmutableMatrix.zeros(0, 0)
        if size and (self._matrix - self._matrix.T).det() != 1:
            raise DomainError("not a Seifert matrix: det(V - V^T) != 1")

    @classmethod
    def empty(cls) -> SeifertMatrix:
        return cls(())

    @classmethod
    def from_matrix(cls, matrix: Matrix) -> SeifertMatrix:
        return cls(matrix.tolist())

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    @property
    def size(self) -> int:
        return len(self._rows)

    @property
    def genus(self) -> int:
        return self.size // 2

    @property
    def matrix(self) -> ImmutableMatrix:
        return self._matrix

    def entry(self, i: int, j: int) -> int:
        return self._rows[i][j]

    def to_text(self) -> str:
        lines = [f"g={self.genus}"]
        lines.extend(" ".join(str(entry) for entry in row) for row in self._rows)
        return "\n".join(lines)

    def __eq__(self, other) -> bool:
        return isinstance(other, SeifertMatrix) and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"SeifertMatrix({[list(row) for row in self._rows]})"


# Invariants


def alexander_polynomial(V: SeifertMatrix) -> LaurentPoly:
    """normalize(det(V - tV^T)); the empty matrix gives 1."""
    if V.size == 0:
        return LaurentPoly.one()
    M = V.matrix
    det = (M - T * M.T).det(method="berkowitz")
    return normalize(LaurentPoly.from_poly(Poly(det, T)))


def _sign_changes(values: Sequence) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia(form: Matrix) -> tuple[int, int, int]:
    """
    (positive, negative, zero) eigenvalue counts of a rational symmetric matrix.

    The characteristic polynomial is real-rooted, so Descartes' rule of signs
    counts its positive and negative roots exactly.
    """
    if form.rows == 0:
        return (0, 0, 0)
    coeffs = form.charpoly(X).all_coeffs()
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1
    degree = len(coeffs) - 1
    mirrored = [c * (-1) ** (degree - i) for i, c in enumerate(coeffs)]
    return (_sign_changes(coeffs), _sign_changes(mirrored), zero)


def circle_point(s: CircleParameter) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts of ((1 - s^2) + 2is)/(1 + s^2); None gives -1."""
    if s is None:
        return (Fraction(-1), Fraction(0))
    s = Fraction(s)
    denom = 1 + s * s
    return ((1 - s * s) / denom, 2 * s / denom)


def circle_u(s: CircleParameter) -> Fraction:
    """u = omega + omega^-1 = 2 Re(omega) at the circle parameter s."""
    return 2 * circle_point(s)[0]


def signature_at(V: SeifertMatrix, s: CircleParameter) -> int:
    """
    Signature of (1 - w)V + (1 - conj(w))V^T at w = ((1 - s^2) + 2is)/(1 + s^2).

    ``s = None`` selects w = -1. Up to a positive factor the form equals
    |s|(V + V^T) - i(V - V^T); its signature is half that of the real
    symmetric block form [[A, -B], [B, A]].
    """
    if V.size == 0:
        return 0
    M = Matrix(V.matrix)
    if s is None:
        positive, negative, zero = inertia(M + M.T)
        doubled = False
    else:
        s = abs(Fraction(s))
        if s == 0:
            return 0
        A = Rational(s.numerator, s.denominator) * (M + M.T)
        B = -(M - M.T)
        block = Matrix.vstack(Matrix.hstack(A, -B), Matrix.hstack(B, A))
        positive, negative, zero = inertia(block)
        doubled = True
    if zero:
        raise DomainError("signature undefined at Alexander root")
    value = positive - negative
    return value // 2 if doubled else value


def signature(V: SeifertMatrix) -> int:
    """The classical signature, taken at w = -1."""
    return signature_at(V, None)


def determinant(V: SeifertMatrix) -> int:
    """|Delta(-1)|, the knot determinant."""
    return abs(int(alexander_polynomial(V).evaluate(-1)))


def arf(V: SeifertMatrix) -> int:
    """0 iff |Delta(-1)| = +-1 mod 8."""
    return 0 if determinant(V) % 8 in (1, 7) else 1


# Transforms


def connected_sum(V: SeifertMatrix, W: SeifertMatrix) -> SeifertMatrix:
    if V.size == 0:
        return W
    if W.size == 0:
        return V
    return SeifertMatrix.from_matrix(diag(Matrix(V.matrix), Matrix(W.matrix)))


def mirror(V: SeifertMatrix) -> SeifertMatrix:
    return SeifertMatrix.from_matrix(-V.matrix.T)


def reverse(V: SeifertMatrix) -> SeifertMatrix:
    return SeifertMatrix.from_matrix(V.matrix.T)


def mirror_reverse(V: SeifertMatrix) -> SeifertMatrix:
    return SeifertMatrix.from_matrix(-V.matrix)


def concordance_inverse(V: SeifertMatrix) -> SeifertMatrix:
    """-K: the reversed mirror image."""
    return mirror_reverse(V)


def concordance_difference(V: SeifertMatrix, W: SeifertMatrix) -> SeifertMatrix:
    """K # -J."""
    return connected_sum(V, mirror_reverse(W))


# Builtins


def twist(j: int) -> SeifertMatrix:
    """Twist knot T_j: Delta = jt^2 - (2j - 1)t + j, Arf = j mod 2; T_1 is the trefoil."""
    if j < 1:
        raise DomainError(f"twist knot needs j >= 1, got {j}")
    return SeifertMatrix([[-1, 1], [0, -j]])


def operator_r(k: int) -> SeifertMatrix:
    """Pattern of R^{k,J}; Delta = (kt - (k + 1))((k + 1)t - k)."""
    if k < 1:
        raise DomainError(f"operator needs k >= 1, got {k}")
    return SeifertMatrix([[-k, 1], [0, k + 1]])


def operator_q(k: int) -> SeifertMatrix:
    # Same Seifert form as R^k; the two differ only by infection data.
    return operator_r(k)


def figure_eight() -> SeifertMatrix:
    return SeifertMatrix([[1, 1], [0, -1]])


BUILTIN_MATRICES = {
    "unknot": lambda _: SeifertMatrix.empty(),
    "trefoil": lambda _: twist(1),
    "figure-eight": lambda _: figure_eight(),
    "twist": twist,
    "operator-r": operator_r,
    "operator-q": operator_q,
}


def builtin_matrix(name: str, param: Optional[int] = None) -> SeifertMatrix:
    if name not in BUILTIN_MATRICES:
        raise DomainError(
            f"unknown builtin matrix {name!r}; expected one of {sorted(BUILTIN_MATRICES)}"
        )
    if name in ("twist", "operator-r", "operator-q") and param is None:
        raise DomainError(f"builtin {name!r} needs a parameter")
    return BUILTIN_MATRICES[name](param)


# Derivatives


def _primitive(x: int, y: int) -> DerivativeClass:
    if x < 0 or (x == 0 and y < 0):
        x, y = -x, -y
    return DerivativeClass(x=x, y=y)


def genus_one_derivatives(V: SeifertMatrix) -> list[DerivativeClass]:
    """
    Primitive solutions of x^2 V11 + xy (V12 + V21) + y^2 V22 = 0, up to sign.

    Returns 0, 1 or 2 classes; no integral solution is not an error.
    """
    if V.size != 2:
        raise DomainError("genus-one derivatives need a 2x2 Seifert matrix")
    a = V.entry(0, 0)
    b = V.entry(0, 1) + V.entry(1, 0)
    c = V.entry(1, 1)
    found: set[tuple[int, int]] = set()
    if a == 0:
        found.add(_primitive(1, 0).as_tuple())
        if (b, c) != (0, 0):
            found.add(_primitive(*_reduce(c, -b)).as_tuple())
    else:
        disc = b * b - 4 * a * c
        root, exact = integer_nthroot(disc, 2) if disc >= 0 else (0, False)
        if not exact:
            logger.debug(f"No isotropic classes: discriminant {disc}")
            return []
        for sign in (1, -1):
            ratio = Fraction(-b + sign * root, 2 * a)
            found.add(_primitive(ratio.numerator, ratio.denominator).as_tuple())
    return [DerivativeClass(x=x, y=y) for x, y in sorted(found)]


def _reduce(x: int, y: int) -> tuple[int, int]:
    g = gcd(x, y)
    return (x // g, y // g)


def is_algebraically_slice_genus_one(V: SeifertMatrix) -> bool:
    """True when a 2x2 Seifert form has a derivative class."""
    return V.size == 2 and bool(genus_one_derivatives(V))


def self_linking(V: SeifertMatrix, vector: Sequence[int]) -> int:
    v = Matrix(vector)
    return int((v.T * Matrix(V.matrix) * v)[0, 0])


# Text format

_HEADER_RE = re.compile(r"^\s*g\s*=\s*(\d+)\s*$")


def parse_seifert(text: str) -> SeifertMatrix:
    """Read ``g=<genus>`` followed by 2g rows of whitespace-separated integers."""
    lines = [
        (number, raw.split("#", 1)[0])
        for number, raw in enumerate(text.splitlines(), start=1)
    ]
    lines = [(number, content) for number, content in lines if content.strip()]
    if not lines:
        raise ParseError("expected a 'g=<genus>' header", 1)
    number, header = lines[0]
    match = _HEADER_RE.match(header)
    if match is None:
        raise ParseError("expected a 'g=<genus>' header", 1, line=number)
    size = 2 * int(match.group(1))
    body = lines[1:]
    if len(body) != size:
        line = body[size][0] if len(body) > size else number + len(body) + 1
        raise ParseError(f"expected {size} matrix rows, found {len(body)}", 1, line=line)
    rows = []
    for number, content in body:
        row = []
        for item in re.finditer(r"\S+", content):
            try:
                row.append(int(item.group()))
            except ValueError as exc:
                raise ParseError(
                    f"bad integer {item.group()!r}", item.start() + 1, line=number
                ) from exc
        if len(row) != size:
            raise ParseError(f"expected {size} entries, found {len(row)}", 1, line=number)
        rows.append(row)
    return SeifertMatrix(rows)
