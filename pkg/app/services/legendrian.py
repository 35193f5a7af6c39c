"""
Legendrian front words and the classical invariants tb and rot.

A front is read left to right as a word of events acting on the strands
currently alive, numbered 1, 2, ... from the bottom:

    L<i>  a left cusp; its lower branch sits at i, its upper at i + 1
    X<i>  the strands at i and i + 1 cross
    R<i>  a right cusp joins the strands at i and i + 1

Closed fronts start and end with no strands. Operator fronts live in the
solid torus: they start and end with ``seam`` strands and the strand leaving
at position j re-enters at position j. Orientation is fixed by leaving the
first left cusp along its lower branch, moving right.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

from app.utils.errors import DomainError, FrontError, ParseError
from app.utils.global_logging import get_logger
from app.utils.types import LegInvariants, TauBounds

logger = get_logger(__name__)

EVENT_RE = re.compile(r"^([LRX])(\d+)$")
EVENT_KINDS = ("L", "R", "X")


@dataclass(frozen=True)
class FrontEvent:
    kind: str
    index: int

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise DomainError(f"unknown front event {self.kind!r}")
        if self.index < 1:
            raise DomainError(f"front event index must be positive, got {self.index}")

    @property
    def delta(self) -> int:
        """Change in the number of live strands."""
        return {"L": 2, "R": -2, "X": 0}[self.kind]

    def shifted(self, amount: int) -> FrontEvent:
        return FrontEvent(self.kind, self.index + amount)

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"


@dataclass(frozen=True)
class FrontTrace:
    """Strand tracing result: arc directions and the signed counts."""

    arcs: int
    direction: dict[int, bool]
    components: int
    writhe: int
    up_cusps: int
    down_cusps: int
    first_left: Optional[int]

    @property
    def cusps(self) -> int:
        return self.up_cusps + self.down_cusps


@dataclass(frozen=True)
class _Simulation:
    arcs: int
    left_partner: dict[int, int]
    right_partner: dict[int, int]
    exits: list[int]
    cusps: list[tuple[str, int, int]]
    crossings: list[tuple[int, int]]
    first_left: Optional[int]


def _simulate(events: Sequence[FrontEvent], seam: int, stop: Optional[int] = None):
    """Run the events; with ``stop`` return the live arcs after that many events."""
    strands = list(range(seam))
    next_arc = seam
    left_partner: dict[int, int] = {}
    right_partner: dict[int, int] = {}
    cusps: list[tuple[str, int, int]] = []
    crossings: list[tuple[int, int]] = []
    first_left = None
    for number, event in enumerate(events):
        if stop is not None and number == stop:
            return strands
        i, count = event.index, len(strands)
        if event.kind == "L":
            if i > count + 1:
                raise FrontError(
                    f"event {number + 1} ({event}): left cusp index must be at most {count + 1}"
                )
            lower, upper = next_arc, next_arc + 1
            next_arc += 2
            strands[i - 1 : i - 1] = [lower, upper]
            left_partner[lower], left_partner[upper] = upper, lower
            cusps.append(("L", lower, upper))
            if first_left is None:
                first_left = number
            continue
        if i + 1 > count:
            raise FrontError(
                f"event {number + 1} ({event}): needs strands {i} and {i + 1}, "
                f"only {count} live"
            )
        lower, upper = strands[i - 1], strands[i]
        if event.kind == "X":
            strands[i - 1], strands[i] = upper, lower
            crossings.append((lower, upper))
        else:
            del strands[i - 1 : i + 1]
            right_partner[lower], right_partner[upper] = upper, lower
            cusps.append(("R", lower, upper))
    if stop is not None:
        return strands
    if len(strands) != seam:
        raise FrontError(
            f"open strands at end: {len(strands)} live, expected {seam}"
        )
    return _Simulation(
        arcs=next_arc,
        left_partner=left_partner,
        right_partner=right_partner,
        exits=strands,
        cusps=cusps,
        crossings=crossings,
        first_left=first_left,
    )


def _walk(sim: _Simulation, arc: int, rightward: bool, direction: dict[int, bool]):
    entry_of_exit = {exit_arc: position for position, exit_arc in enumerate(sim.exits)}
    while arc not in direction:
        direction[arc] = rightward
        if rightward:
            if arc in sim.right_partner:
                arc, rightward = sim.right_partner[arc], False
            else:
                # leaves through the seam and re-enters at the same height
                arc = entry_of_exit[arc]
        else:
            if arc in sim.left_partner:
                arc, rightward = sim.left_partner[arc], True
            else:
                arc = sim.exits[arc]


def trace_front(events: Sequence[FrontEvent], seam: int = 0) -> FrontTrace:
    if seam < 0:
        raise DomainError(f"seam strand count must be nonnegative, got {seam}")
    sim = _simulate(events, seam)
    if sim.arcs == 0:
        raise FrontError("not a knot: the front is empty")
    direction: dict[int, bool] = {}
    if sim.first_left is not None:
        _, lower, _ = next(c for c in sim.cusps if c[0] == "L")
        _walk(sim, lower, True, direction)
    else:
        _walk(sim, 0, True, direction)
    components = 1
    for arc in range(sim.arcs):
        if arc not in direction:
            components += 1
            _walk(sim, arc, True, direction)

    writhe = sum(1 if direction[a] == direction[b] else -1 for a, b in sim.crossings)
    up = down = 0
    for kind, lower, _ in sim.cusps:
        lower_rightward = direction[lower]
        # left cusp: down when the lower branch leaves rightward; right cusp: up
        if (kind == "L") == lower_rightward:
            down += 1
        else:
            up += 1
    logger.debug(
        f"Traced {len(events)} events: {sim.arcs} arcs, {components} component(s), "
        f"writhe {writhe}, cusps up {up} down {down}"
    )
    return FrontTrace(
        arcs=sim.arcs,
        direction=direction,
        components=components,
        writhe=writhe,
        up_cusps=up,
        down_cusps=down,
        first_left=sim.first_left,
    )


@dataclass(frozen=True)
class FrontWord:
    """A validated one-component front; ``seam`` > 0 marks an operator front."""

    events: tuple[FrontEvent, ...]
    seam: int = 0
    trace: FrontTrace = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        trace = trace_front(self.events, self.seam)
        if trace.components != 1:
            raise FrontError(f"not a knot: {trace.components} components")
        object.__setattr__(self, "trace", trace)

    @classmethod
    def from_text(cls, text: str, seam: int = 0) -> FrontWord:
        return parse_front(text, seam)

    @property
    def closed(self) -> bool:
        return self.seam == 0

    def to_text(self) -> str:
        return " ".join(str(event) for event in self.events)

    def __str__(self) -> str:
        return self.to_text()


def _read_events(text: str) -> list[FrontEvent]:
    events: list[FrontEvent] = []
    offset = 0
    for number, raw in enumerate(text.splitlines(keepends=True), start=1):
        content = raw.split("#", 1)[0]
        for match in re.finditer(r"\S+", content):
            token = match.group()
            parsed = EVENT_RE.match(token)
            if parsed is None or int(parsed.group(2)) < 1:
                raise ParseError(
                    f"malformed front token {token!r}",
                    offset + match.start() + 1,
                    line=number,
                    column=match.start() + 1,
                )
            events.append(FrontEvent(parsed.group(1), int(parsed.group(2))))
        offset += len(raw)
    return events


def parse_front(text: str, seam: int = 0) -> FrontWord:
    """Parse a whitespace-separated event word; ``#`` starts a comment."""
    return FrontWord(tuple(_read_events(text)), seam)


def _invariants(trace: FrontTrace) -> LegInvariants:
    if (trace.down_cusps - trace.up_cusps) % 2:
        raise FrontError("odd cusp imbalance: rotation number is not an integer")
    return LegInvariants(
        tb=trace.writhe - trace.cusps // 2,
        rot=(trace.down_cusps - trace.up_cusps) // 2,
    )


def classical_invariants(front: FrontWord) -> LegInvariants:
    """tb = writhe - cusps/2 and rot = (down cusps - up cusps)/2."""
    if not front.closed:
        raise FrontError("operator fronts have no absolute invariants; use satellite")
    return _invariants(front.trace)


def operator_invariants(front: FrontWord) -> LegInvariants:
    """The same counts for a front in the solid torus."""
    if front.closed:
        raise FrontError("not an operator front: use classical_invariants")
    return _invariants(front.trace)


def front_invariants(front: FrontWord) -> LegInvariants:
    return classical_invariants(front) if front.closed else operator_invariants(front)


def _zigzag(position: int, rightward: bool, sign: int) -> tuple[FrontEvent, FrontEvent]:
    # L i R(i+1) adds two down cusps on a rightward strand, two up cusps on a leftward one
    if rightward == (sign > 0):
        return FrontEvent("L", position), FrontEvent("R", position + 1)
    return FrontEvent("L", position + 1), FrontEvent("R", position)


def stabilize(
    item: Union[FrontWord, LegInvariants],
    sign: int = 1,
    at: Optional[int] = None,
    strand: Optional[int] = None,
) -> Union[FrontWord, LegInvariants]:
    """
    Add one zig-zag: (tb, rot) -> (tb - 1, rot + sign).

    On a front word the zig-zag goes on the strand at height ``strand`` after
    the first ``at`` events; by default just after the first left cusp on its
    lower branch.
    """
    if sign not in (1, -1):
        raise DomainError(f"stabilization sign must be +1 or -1, got {sign}")
    if isinstance(item, LegInvariants):
        return LegInvariants(tb=item.tb - 1, rot=item.rot + sign)

    front = item
    first = front.trace.first_left
    if first is None:
        raise FrontError("stabilize needs a left cusp to fix the orientation")
    if at is None:
        at = first + 1
        strand = front.events[first].index if strand is None else strand
    if not first < at <= len(front.events):
        raise FrontError(
            f"stabilize after the first left cusp: at must be in {first + 1}..{len(front.events)}"
        )
    live = _simulate(front.events, front.seam, stop=at)
    strand = 1 if strand is None else strand
    if not 1 <= strand <= len(live):
        raise DomainError(f"no strand at height {strand} after {at} events")
    rightward = front.trace.direction[live[strand - 1]]
    zigzag = _zigzag(strand, rightward, sign)
    events = front.events[:at] + zigzag + front.events[at:]
    logger.debug(f"Stabilized ({sign:+d}) with {zigzag[0]} {zigzag[1]} after event {at}")
    return FrontWord(events, front.seam)


def commute_rewrite(front: FrontWord, index: int) -> Optional[FrontWord]:
    """
    Swap events ``index`` and ``index + 1`` (0-based) when they act on
    disjoint, non-adjacent heights; otherwise return None.
    """
    if not 0 <= index < len(front.events) - 1:
        raise DomainError(f"no adjacent event pair at {index}")
    first, second = front.events[index], front.events[index + 1]
    if first.kind == second.kind == "L" and index == front.trace.first_left:
        # the first left cusp carries the orientation base point
        return None
    a, b = first.index, second.index
    # lowest height above everything the first event leaves behind
    clear_above = {"L": a + 2, "X": a + 2, "R": a}[first.kind]
    if b >= clear_above:
        swapped = (second.shifted(-first.delta), first)
    elif b + 1 <= a - 1:
        swapped = (second, first.shifted(second.delta))
    else:
        return None
    events = front.events[:index] + swapped + front.events[index + 2 :]
    return FrontWord(events, front.seam)


def legendrian_satellite(
    pattern: Union[FrontWord, LegInvariants], companion: LegInvariants
) -> LegInvariants:
    """A winding-zero pattern on a tb = 0 companion keeps the pattern's invariants."""
    if companion.tb != 0:
        raise DomainError("stabilize companion to tb = 0 first")
    if isinstance(pattern, FrontWord):
        return operator_invariants(pattern)
    return pattern


def iterate_satellite(
    pattern: Union[FrontWord, LegInvariants], companion: LegInvariants, times: int
) -> LegInvariants:
    if times < 0:
        raise DomainError(f"iteration count must be nonnegative, got {times}")
    current = companion
    for _ in range(times):
        current = legendrian_satellite(pattern, current)
    return current


def legendrian_connected_sum(first: LegInvariants, second: LegInvariants) -> LegInvariants:
    return LegInvariants(tb=first.tb + second.tb + 1, rot=first.rot + second.rot)


def tau_lower_bound(inv: LegInvariants) -> int:
    """tau >= (tb + |rot| + 1) / 2 from tb + |rot| <= 2 tau - 1."""
    return -(-(inv.tb + abs(inv.rot) + 1) // 2)


def tau_bounds(inv: LegInvariants, genus_upper: int) -> TauBounds:
    """The Plamenevskaya lower bound against tau <= g from any Seifert surface."""
    if genus_upper < 0:
        raise DomainError(f"genus bound must be nonnegative, got {genus_upper}")
    lower = tau_lower_bound(inv)
    if lower > genus_upper:
        raise DomainError(
            f"inconsistent certificate inputs: lower bound {lower} exceeds genus {genus_upper}"
        )
    exact = lower if lower == genus_upper else None
    return TauBounds(lower=lower, upper=genus_upper, exact=exact)


# Builtin fronts

TWIST_BLOCK = "L3 L5 X4 X2 R1 R1"


def unknot_front() -> str:
    return "L1 R1"


def trefoil_front() -> str:
    return "L1 L3 X2 X2 X2 R3 R1"


def twist_front(j: int) -> str:
    if j < 1:
        raise DomainError(f"twist-front needs j >= 1, got {j}")
    return " ".join(["L1 L3 X2"] + [TWIST_BLOCK] * (j - 1) + ["L4 X3 X5 R4", "X2 R1 R1"])


def doubling_front() -> str:
    """The clasp of the Whitehead doubling pattern on two seam strands."""
    return "L2 X1 X3 R2"


def q_front(k: int) -> str:
    """A stabilized clasp with k tb-neutral twist blocks on the two seam strands."""
    if k < 1:
        raise DomainError(f"q-front needs k >= 1, got {k}")
    return " ".join(["L1 R2"] + [TWIST_BLOCK] * k + [doubling_front()])


@dataclass(frozen=True)
class BuiltinFront:
    build: Callable[..., str]
    seam: int
    expected: LegInvariants
    parameter: Optional[str] = None


BUILTIN_FRONTS: dict[str, BuiltinFront] = {
    "unknot": BuiltinFront(unknot_front, 0, LegInvariants(tb=-1, rot=0)),
    "trefoil": BuiltinFront(trefoil_front, 0, LegInvariants(tb=1, rot=0)),
    "twist-front": BuiltinFront(twist_front, 0, LegInvariants(tb=1, rot=0), "j"),
    "doubling-front": BuiltinFront(doubling_front, 2, LegInvariants(tb=1, rot=0)),
    "q-front": BuiltinFront(q_front, 2, LegInvariants(tb=0, rot=1), "k"),
}


def builtin_front(name: str, param: Optional[int] = None) -> FrontWord:
    """Build a named front and check it against its recorded invariants."""
    spec = BUILTIN_FRONTS.get(name)
    if spec is None:
        raise DomainError(
            f"unknown builtin front {name!r}; choose from {', '.join(BUILTIN_FRONTS)}"
        )
    if spec.parameter is None:
        text = spec.build()
    else:
        if param is None:
            raise DomainError(f"builtin front {name!r} needs --{spec.parameter}")
        text = spec.build(param)
    front = parse_front(text, spec.seam)
    computed = front_invariants(front)
    if computed != spec.expected:
        raise FrontError(
            f"builtin front {name!r} transcribes to {computed}, expected {spec.expected}"
        )
    return front
