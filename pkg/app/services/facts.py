"""
Cited hypotheses the certificate engine may assume but never proves.

A facts file holds one ``FACT "<statement-id>" CITE "<locus>"`` per line.
Statement ids in a file may be fnmatch patterns, so one line can cover a
family such as ``fos-nonzero Q([3-9]) <0>``.
"""

import re
from fnmatch import fnmatchcase
from pathlib import Path
from typing import Iterable, Optional, Union

from app.utils.errors import ParseError
from app.utils.global_logging import get_logger
from app.utils.parsers import iter_fact_lines
from app.utils.types import Fact

logger = get_logger(__name__)

PUBLISHED_FACTS = Path(__file__).resolve().parents[2] / "facts" / "published.facts"

TAU_RE = re.compile(r"^tau (?P<knot>.+) = (?P<value>-?\d+)$")


def _squash(text: str) -> str:
    return re.sub(r"\s+", "", text)


class FactBook:
    def __init__(self, facts: Iterable[Fact] = ()):
        self._facts = list(facts)

    @classmethod
    def from_text(cls, text: str) -> "FactBook":
        return cls(
            Fact(statement=item.statement, citation=item.citation, line=item.line)
            for item in iter_fact_lines(text)
        )

    @classmethod
    def empty(cls) -> "FactBook":
        return cls()

    @property
    def facts(self) -> list[Fact]:
        return list(self._facts)

    def __len__(self) -> int:
        return len(self._facts)

    def find(self, statement: str) -> Optional[Fact]:
        """The first fact whose id (or pattern) matches ``statement``."""
        for fact in self._facts:
            if fact.statement == statement or fnmatchcase(statement, fact.statement):
                return fact
        return None

    def __contains__(self, statement: str) -> bool:
        return self.find(statement) is not None

    def tau(self, knot_label: str) -> Optional[tuple[int, Fact]]:
        """An injected ``tau <knot> = <value>`` fact; knot labels compare without spaces."""
        wanted = _squash(knot_label)
        for fact in self._facts:
            match = TAU_RE.match(fact.statement)
            if match and _squash(match.group("knot")) == wanted:
                return int(match.group("value")), fact
        return None

    def merged(self, other: "FactBook") -> "FactBook":
        return FactBook(self._facts + other.facts)


def load_facts(path: Optional[Union[str, Path]] = None) -> FactBook:
    """Read a facts file; the published set when no path is given."""
    path = Path(path) if path is not None else PUBLISHED_FACTS
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read facts file {path}: {exc.strerror}", 1) from exc
    book = FactBook.from_text(text)
    logger.info(f"Loaded {len(book)} facts from {path}")
    return book
