"""
Tests for facts files and the fact book.
"""

import pytest

from app.services.facts import FactBook, load_facts
from app.utils.errors import ParseError

TEXT = """
# cited hypotheses
FACT "fos-nonzero Q([3-9]) <0>" CITE "Cochran-Harvey-Leidy 2011"
FACT "tau cable(whitehead-double, 2) = 2" CITE "Hom 2014"
FACT "rho0-avoids-fos neg-trefoils-* R(*,U)" CITE "finite FOS set"
"""


def test_find_exact_and_wildcard():
    """Test that statement ids in a file act as fnmatch patterns."""
    book = FactBook.from_text(TEXT)
    assert len(book) == 3
    assert book.find("fos-nonzero Q(3) <0>").citation == "Cochran-Harvey-Leidy 2011"
    assert "fos-nonzero Q(9) <0>" in book
    assert "fos-nonzero Q(2) <0>" not in book
    assert "rho0-avoids-fos neg-trefoils-3 R(4,U)" in book
    assert book.find("rho0-avoids-fos left-trefoil R(4,U)") is None


def test_tau_lookup_ignores_spaces():
    """Test injected tau values keyed by knot label."""
    book = FactBook.from_text(TEXT)
    value, fact = book.tau("cable(whitehead-double,2)")
    assert value == 2
    assert fact.line == 4
    assert book.tau("whitehead-double") is None


def test_malformed_lines():
    """Test that malformed lines report their line number."""
    with pytest.raises(ParseError) as info:
        FactBook.from_text('FACT "a" CITE "b"\nFACT "missing cite"\n')
    assert info.value.line == 2
    with pytest.raises(ParseError):
        FactBook.from_text('FACT "unterminated CITE "x"')


def test_published_facts():
    """Test the shipped facts file."""
    book = load_facts()
    for k in (3, 4, 9, 10, 20):
        assert f"fos-nonzero Q({k}) <0>" in book
    assert "fos-nonzero Q(2) <0>" not in book
    assert book.tau("whitehead-double")[0] == 1
    assert book.tau("cable(whitehead-double, 2)")[0] == 2
    assert "rho0-span-avoids-fos {twist(2), twist(4)} R(1,U)" in book
    assert "upsilon-summand genus-one tau-one" in book


def test_missing_file(tmp_path):
    """Test that an unreadable path is an input error."""
    with pytest.raises(ParseError, match="cannot read facts file"):
        load_facts(tmp_path / "absent.facts")


def test_load_from_path(tmp_path):
    """Test reading a user facts file and merging it with another book."""
    path = tmp_path / "mine.facts"
    path.write_text('FACT "in P0 left-trefoil" CITE "made up for the test"\n')
    book = load_facts(path).merged(FactBook.from_text(TEXT))
    assert len(book) == 4
    assert "in P0 left-trefoil" in book
