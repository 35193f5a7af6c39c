"""
Text grammars: Laurent polynomials, parameter ranges and facts files.

Seifert-matrix files, knot expressions and front words have their own readers
next to the types they build; they share the tokenizer and ParseError here.
"""

import re
import shlex
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from app.utils.errors import ParseError

TOKEN_RE = re.compile(
    r"""
    (?P<space>\s+)
  | (?P<number>\d+(?:/\d+)?)
  | (?P<string>"[^"]*"|'[^']*')
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>\*\*|\.\.|[-+*^(),=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text: str) -> list[Token]:
    """Split text into tokens; positions are 1-based."""
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        match = TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos + 1)
        kind = match.lastgroup
        if kind != "space":
            tokens.append(Token(kind, match.group(), pos + 1))
        pos = match.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


class TokenStream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.tokens[self.index]
        if token.kind != "end":
            self.index += 1
        return token

    def accept(self, text: str) -> bool:
        if self.current.text == text and self.current.kind in ("op", "name"):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> Token:
        if self.current.text != text:
            self.fail(f"expected {text!r}")
        return self.advance()

    def expect_kind(self, kind: str, what: str) -> Token:
        if self.current.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def expect_int(self) -> int:
        negative = self.accept("-")
        token = self.expect_kind("number", "an integer")
        if "/" in token.text:
            raise ParseError("expected an integer", token.position)
        value = int(token.text)
        return -value if negative else value

    def expect_end(self):
        if self.current.kind != "end":
            self.fail("unexpected trailing input")

    def fail(self, message: str):
        token = self.current
        found = token.text or "end of input"
        raise ParseError(f"{message}, found {found!r}", token.position)


def parse_laurent(text: str):
    """Parse ``2*t^2 - 5*t + 2``, ``8*t^-1 - 9``, ``(t - 2)*(2t - 1)``."""
    from app.services.laurent import LaurentPoly

    stream = TokenStream(text)

    def expr():
        result = LaurentPoly.zero()
        negate = stream.accept("-")
        if not negate:
            stream.accept("+")
        term_value = term()
        result = result - term_value if negate else result + term_value
        while stream.current.text in ("+", "-"):
            op = stream.advance().text
            term_value = term()
            result = result + term_value if op == "+" else result - term_value
        return result

    def term():
        value = power()
        while True:
            if stream.accept("*"):
                value = value * power()
            elif stream.current.kind in ("number", "name") or stream.current.text == "(":
                value = value * power()
            else:
                return value

    def power():
        base = atom()
        if stream.current.text in ("^", "**"):
            stream.advance()
            if stream.accept("("):
                exponent = stream.expect_int()
                stream.expect(")")
            else:
                exponent = stream.expect_int()
            return base**exponent
        return base

    def atom():
        token = stream.current
        if token.kind == "number":
            stream.advance()
            return LaurentPoly.constant(Fraction(token.text))
        if token.kind == "name" and token.text == "t":
            stream.advance()
            return LaurentPoly.t()
        if token.text == "(":
            stream.advance()
            value = expr()
            stream.expect(")")
            return value
        if token.text == "-":
            stream.advance()
            return -atom()
        stream.fail("expected a number, 't' or '('")

    value = expr()
    stream.expect_end()
    return value


def parse_range(text: str) -> list[int]:
    """Parse ``3``, ``1..5`` or ``1,2,7`` into a sorted list of integers."""
    values: set[int] = set()
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            raise ParseError("empty range item", 1)
        if ".." in chunk:
            lo_text, hi_text = chunk.split("..", 1)
            try:
                lo, hi = int(lo_text), int(hi_text)
            except ValueError as exc:
                raise ParseError(f"bad range {chunk!r}", text.find(chunk) + 1) from exc
            if lo > hi:
                raise ParseError(f"empty range {chunk!r}", text.find(chunk) + 1)
            values.update(range(lo, hi + 1))
        else:
            try:
                values.add(int(chunk))
            except ValueError as exc:
                raise ParseError(f"bad integer {chunk!r}", text.find(chunk) + 1) from exc
    return sorted(values)


@dataclass(frozen=True)
class FactLine:
    statement: str
    citation: str
    line: int


def iter_fact_lines(text: str) -> Iterator[FactLine]:
    """Lines of the form ``FACT "<statement-id>" CITE "<locus>"``; ``#`` comments."""
    for number, raw in enumerate(text.splitlines(), start=1):
        try:
            parts = shlex.split(raw, comments=True)
        except ValueError as exc:
            raise ParseError(f"unterminated quote: {exc}", 1, line=number) from exc
        if not parts:
            continue
        if len(parts) != 4 or parts[0] != "FACT" or parts[2] != "CITE":
            raise ParseError(
                'expected FACT "<statement-id>" CITE "<locus>"', 1, line=number
            )
        yield FactLine(statement=parts[1].strip(), citation=parts[3].strip(), line=number)
