"""
Tests for front words, tb/rot, stabilization, satellites and tau bounds.
"""

import random

import pytest

from app.services.legendrian import (
    BUILTIN_FRONTS,
    FrontWord,
    builtin_front,
    classical_invariants,
    commute_rewrite,
    front_invariants,
    iterate_satellite,
    legendrian_connected_sum,
    legendrian_satellite,
    operator_invariants,
    parse_front,
    stabilize,
    tau_bounds,
    twist_front,
)
from app.utils.errors import DomainError, FrontError, ParseError
from app.utils.types import LegInvariants


def inv(tb: int, rot: int) -> LegInvariants:
    return LegInvariants(tb=tb, rot=rot)


def test_unknot_front():
    """Test the max-tb unknot: two cusps and no crossings."""
    assert classical_invariants(parse_front("L1 R1")) == inv(-1, 0)


def test_trefoil_front():
    """Test the right-handed trefoil with three positive crossings."""
    front = parse_front("L1 L3 X2 X2 X2 R3 R1")
    assert front.trace.writhe == 3
    assert front.trace.cusps == 4
    assert classical_invariants(front) == inv(1, 0)


@pytest.mark.parametrize("j", range(1, 9))
def test_twist_fronts(j):
    """Test tb = 1 and rot = 0 for every twist-knot front."""
    front = builtin_front("twist-front", j)
    assert classical_invariants(front) == inv(1, 0)
    assert front.trace.cusps == 4 * j + 2


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_q_front(k):
    """Test the operator front invariants tb = 0 and rot = 1."""
    front = builtin_front("q-front", k)
    assert not front.closed
    assert operator_invariants(front) == inv(0, 1)


def test_doubling_front():
    """Test the Whitehead doubling clasp."""
    assert operator_invariants(builtin_front("doubling-front")) == inv(1, 0)


def test_all_builtins_validate():
    """Test every registered builtin against its recorded invariants."""
    for name, spec in BUILTIN_FRONTS.items():
        front = builtin_front(name, 3 if spec.parameter else None)
        assert front_invariants(front) == spec.expected


def test_builtin_errors():
    """Test unknown names and missing or bad parameters."""
    with pytest.raises(DomainError):
        builtin_front("figure-eight")
    with pytest.raises(DomainError, match="needs --j"):
        builtin_front("twist-front")
    with pytest.raises(DomainError):
        twist_front(0)


def test_two_component_words():
    """Test that split and nested unlinks are rejected."""
    with pytest.raises(FrontError, match="not a knot"):
        parse_front("L1 L1 R1 R1")
    with pytest.raises(FrontError, match="not a knot"):
        parse_front("L1 R1 L1 R1")
    with pytest.raises(FrontError, match="not a knot"):
        parse_front("L1 L2 X1 X1 R2 R1")


def test_open_strands():
    """Test unbalanced words and bad indices."""
    with pytest.raises(FrontError, match="open strands at end"):
        parse_front("L1 L1 R1")
    with pytest.raises(FrontError, match="open strands at end"):
        parse_front("L1 X1", seam=0)
    with pytest.raises(FrontError):
        parse_front("L1 X2 R1")
    with pytest.raises(FrontError):
        parse_front("L3 R1")
    with pytest.raises(FrontError, match="not a knot"):
        parse_front("")


def test_parse_errors_and_comments():
    """Test token positions and comment handling."""
    front = parse_front("# max-tb unknot\nL1   # left\nR1\n")
    assert front.to_text() == "L1 R1"
    with pytest.raises(ParseError) as info:
        parse_front("L1 Q1 R1")
    assert info.value.position == 4
    with pytest.raises(ParseError) as info:
        parse_front("L1\nR0")
    assert info.value.line == 2
    assert info.value.column == 1


def test_operator_front_misuse():
    """Test that absolute invariants refuse operator fronts and vice versa."""
    message = "operator fronts have no absolute invariants; use satellite"
    with pytest.raises(FrontError, match=message):
        classical_invariants(builtin_front("q-front", 3))
    with pytest.raises(FrontError):
        operator_invariants(parse_front("L1 R1"))


def test_stabilize_invariants():
    """Test the invariant-level rule."""
    assert stabilize(inv(1, 0), 1) == inv(0, 1)
    assert stabilize(inv(0, 1), -1) == inv(-1, 0)
    assert stabilize(stabilize(inv(3, 2), 1), -1) == inv(1, 2)
    with pytest.raises(DomainError):
        stabilize(inv(1, 0), 0)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize(
    "name, param", [("unknot", None), ("trefoil", None), ("twist-front", 2), ("q-front", 2)]
)
def test_stabilize_word_matches_invariants(name, param, sign):
    """Test word-level and invariant-level stabilization agree."""
    front = builtin_front(name, param)
    stabilized = stabilize(front, sign)
    assert isinstance(stabilized, FrontWord)
    assert front_invariants(stabilized) == stabilize(front_invariants(front), sign)


def test_stabilize_on_random_strands():
    """Test agreement at random insertion points, including leftward strands."""
    rng = random.Random(5)
    front = builtin_front("twist-front", 3)
    for _ in range(30):
        first = front.trace.first_left
        at = rng.randint(first + 1, len(front.events))
        live = len(_live_strands(front, at))
        if live == 0:
            continue
        sign = rng.choice([1, -1])
        stabilized = stabilize(front, sign, at=at, strand=rng.randint(1, live))
        expected = stabilize(classical_invariants(front), sign)
        assert classical_invariants(stabilized) == expected


def _live_strands(front, at):
    count = front.seam
    for event in front.events[:at]:
        count += event.delta
    return range(count)


def test_stabilize_before_first_cusp():
    """Test that the orientation base point cannot be moved."""
    with pytest.raises(FrontError):
        stabilize(parse_front("L1 R1"), 1, at=0)


def test_parity_of_tb_plus_rot():
    """Test tb + |rot| is odd on stabilized builtin knots."""
    rng = random.Random(17)
    for _ in range(20):
        front = builtin_front(rng.choice(["unknot", "trefoil"]))
        for _ in range(rng.randint(0, 4)):
            front = stabilize(front, rng.choice([1, -1]))
        value = classical_invariants(front)
        assert (value.tb + abs(value.rot)) % 2 == 1


def test_commute_rewrite_cases():
    """Test distant events commute and touching ones do not."""
    front = parse_front("L1 L3 X2 X2 X2 R3 R1")
    assert commute_rewrite(front, 2) is None
    moved = commute_rewrite(front, 5)
    assert moved.to_text() == "L1 L3 X2 X2 X2 R1 R1"
    assert classical_invariants(moved) == inv(1, 0)
    assert commute_rewrite(parse_front("L1 R1"), 0) is None


def test_commute_rewrite_random_walk():
    """Test that random commuting rewrites keep tb and rot."""
    rng = random.Random(23)
    for start in (
        builtin_front("twist-front", 2),
        builtin_front("twist-front", 4),
        stabilize(builtin_front("trefoil"), 1),
        builtin_front("q-front", 2),
    ):
        expected = front_invariants(start)
        front = start
        for _ in range(60):
            index = rng.randrange(len(front.events) - 1)
            rewritten = commute_rewrite(front, index)
            if rewritten is not None:
                front = rewritten
        assert front_invariants(front) == expected


def test_satellite():
    """Test the tb = 0 companion rule and iteration."""
    q = builtin_front("q-front", 3)
    assert legendrian_satellite(q, inv(0, 1)) == inv(0, 1)
    assert legendrian_satellite(inv(1, 0), inv(0, 0)) == inv(1, 0)
    assert iterate_satellite(q, inv(0, 1), 3) == inv(0, 1)
    with pytest.raises(DomainError, match="stabilize companion to tb = 0 first"):
        legendrian_satellite(q, inv(1, 0))
    with pytest.raises(DomainError, match="stabilize companion to tb = 0 first"):
        iterate_satellite(builtin_front("doubling-front"), inv(0, 0), 2)


def test_companion_from_stabilized_twist_knot():
    """Test that one positive stabilization of a twist front gives a tb = 0 companion."""
    companion = classical_invariants(stabilize(builtin_front("twist-front", 2), 1))
    assert companion == inv(0, 1)
    assert legendrian_satellite(builtin_front("q-front", 4), companion) == inv(0, 1)


def test_connected_sum():
    """Test tb adds with a +1 and rot adds."""
    assert legendrian_connected_sum(inv(1, 0), inv(1, 0)) == inv(3, 0)
    assert legendrian_connected_sum(inv(-1, 0), inv(0, 1)) == inv(0, 1)


def test_tau_bounds():
    """Test exact values and the consistency check."""
    assert tau_bounds(inv(0, 1), 1).exact == 1
    assert tau_bounds(inv(1, 0), 1).exact == 1
    bounds = tau_bounds(inv(-1, 0), 0)
    assert (bounds.lower, bounds.upper, bounds.exact) == (0, 0, 0)
    assert tau_bounds(inv(-3, 0), 2).exact is None
    with pytest.raises(DomainError, match="inconsistent certificate inputs"):
        tau_bounds(inv(3, 0), 1)


@pytest.mark.parametrize("k", [3, 4, 5])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_iterated_q_satellite_tau(k, n):
    """Test exact tau = 1 for iterated Q^k satellites of a tb = 0 companion."""
    value = iterate_satellite(builtin_front("q-front", k), inv(0, 1), n)
    assert tau_bounds(value, 1).exact == 1


def test_tau_lower_bound_monotone_under_stabilization():
    """Test that stabilizing never raises the lower bound."""
    value = inv(1, 0)
    for sign in (1, 1, -1, -1, -1):
        lower = tau_bounds(value, 5).lower
        value = stabilize(value, sign)
        assert tau_bounds(value, 5).lower <= lower
