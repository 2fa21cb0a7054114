"""
Morse-encoded tied pseudo link diagrams.

A diagram is a top-to-bottom list of events acting on the strands that cross
the current horizontal level.  ``seg(r, q)`` is the strand piece at position
``q`` just below row ``r`` (row 0 is the top boundary).  Components are traced
through these pieces; crossings swap continuations, cups and caps turn strands
around.

Orientation: a closed component is traversed starting down the left leg of its
topmost cup; a component that touches the boundary of a braid diagram is
traversed from its top (or, failing that, bottom) boundary end.
"""

from __future__ import annotations

import dataclasses
import itertools
from collections import Counter
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import DiagramError, InputError, ResolutionLimitError
from .monoid import Flavor, MonoidWord, StrandPartition

DEFAULT_MAX_PRECROSSINGS = 20

EVENT_KINDS = ("cup", "cap", "x+", "x-", "p", "tie")
CROSSINGS = ("x+", "x-", "p")


@dataclasses.dataclass(frozen=True)
class MorseEvent:
    kind: str
    i: int
    j: int | None = None

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise InputError(f"unknown event kind {self.kind!r}")
        if (self.kind == "tie") != (self.j is not None):
            raise InputError(f"event {self.kind} has the wrong number of indices")

    def __str__(self):
        return f"{self.kind} {self.i}" + ("" if self.j is None else f" {self.j}")


def Cup(i):
    return MorseEvent("cup", i)


def Cap(i):
    return MorseEvent("cap", i)


def CrossPos(i):
    return MorseEvent("x+", i)


def CrossNeg(i):
    return MorseEvent("x-", i)


def PreCross(i):
    return MorseEvent("p", i)


def Tie(i, j):
    return MorseEvent("tie", i, j)


@dataclasses.dataclass(frozen=True)
class MorseDiagram:
    """``boundary`` is ``None`` for a closed diagram, else the braid width n."""

    rows: tuple[MorseEvent, ...]
    boundary: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def closed(self) -> bool:
        return self.boundary is None

    def widths(self) -> list[int]:
        """Width below every row (index 0 = top boundary); raises on any inconsistency."""
        w = 0 if self.boundary is None else self.boundary
        out = [w]
        for r, ev in enumerate(self.rows, 1):
            if ev.kind == "cup":
                if not 1 <= ev.i <= w + 1:
                    raise DiagramError(f"row {r}: cup {ev.i} outside width {w}", r, w, ev.i)
                w += 2
            elif ev.kind == "cap":
                if w < 2:
                    raise DiagramError(f"row {r}: width underflow (cap on width {w})", r, 2, w)
                if not 1 <= ev.i <= w - 1:
                    raise DiagramError(f"row {r}: cap {ev.i} outside width {w}", r, w, ev.i)
                w -= 2
            elif ev.kind == "tie":
                if ev.i == ev.j:
                    raise DiagramError(f"row {r}: tie endpoints coincide", r, "i != j", ev.i)
                for x in (ev.i, ev.j):
                    if not 1 <= x <= w:
                        raise DiagramError(f"row {r}: tie endpoint {x} outside width {w}", r, w, x)
            else:
                if not 1 <= ev.i <= w - 1:
                    raise DiagramError(f"row {r}: {ev.kind} {ev.i} outside width {w}", r, w, ev.i)
            out.append(w)
        end = 0 if self.boundary is None else self.boundary
        if w != end:
            raise DiagramError(f"bottom width {w} does not match boundary {end}",
                               len(self.rows), end, w)
        return out

    def precrossing_rows(self) -> list[int]:
        return [r for r, ev in enumerate(self.rows, 1) if ev.kind == "p"]

    def serialize(self) -> str:
        head = "morse closed" if self.closed else f"morse braid n={self.boundary}"
        return "\n".join([head] + [str(ev) for ev in self.rows]) + "\n"

    @classmethod
    def parse(cls, text: str) -> MorseDiagram:
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise InputError("empty diagram file")
        head = lines[0].split()
        if head == ["morse", "closed"]:
            boundary = None
        elif len(head) == 3 and head[:2] == ["morse", "braid"] and head[2].startswith("n="):
            try:
                boundary = int(head[2][2:])
            except ValueError:
                raise InputError(f"bad header {lines[0]!r}") from None
        else:
            raise InputError(f"bad header {lines[0]!r}")
        rows = []
        for ln in lines[1:]:
            parts = ln.split()
            try:
                nums = [int(x) for x in parts[1:]]
            except ValueError:
                raise InputError(f"bad event line {ln!r}") from None
            if parts[0] not in EVENT_KINDS or len(nums) != (2 if parts[0] == "tie" else 1):
                raise InputError(f"bad event line {ln!r}")
            rows.append(MorseEvent(parts[0], *nums))
        return cls(tuple(rows), boundary)


def validate(d: MorseDiagram) -> None:
    """Raise :class:`DiagramError` naming the first bad row; return ``None`` when valid."""
    d.widths()


@dataclasses.dataclass(frozen=True)
class Crossing:
    row: int
    kind: str
    # component and orientation (+1 down, -1 up) of the strand leaving at the
    # bottom-right (the over strand of an x+) and at the bottom-left
    comp_a: int
    comp_b: int
    dir_a: int
    dir_b: int

    @property
    def orientation(self) -> int:
        return self.dir_a * self.dir_b

    def sign(self) -> int:
        return {"x+": 1, "x-": -1}[self.kind] * self.orientation


@dataclasses.dataclass(frozen=True)
class ComponentMap:
    """Component id (1-based) and direction of every segment, keyed by ``(row, position)``."""

    count: int
    comp: dict
    direction: dict
    widths: tuple[int, ...]


class _Segments:
    """Adjacency between segment ends; each end links to at most one other end."""

    def __init__(self, d: MorseDiagram):
        self.widths = d.widths()
        self.top: dict = {}
        self.bottom: dict = {}
        for r, ev in enumerate(d.rows, 1):
            wb = self.widths[r - 1]
            through = {}
            if ev.kind == "cup":
                a, b = (r, ev.i), (r, ev.i + 1)
                self.top[a] = (b, "top")
                self.top[b] = (a, "top")
                for q in range(1, wb + 1):
                    through[q] = q if q < ev.i else q + 2
            elif ev.kind == "cap":
                a, b = (r - 1, ev.i), (r - 1, ev.i + 1)
                self.bottom[a] = (b, "bottom")
                self.bottom[b] = (a, "bottom")
                for q in range(1, wb + 1):
                    if q < ev.i:
                        through[q] = q
                    elif q > ev.i + 1:
                        through[q] = q - 2
            elif ev.kind in CROSSINGS:
                for q in range(1, wb + 1):
                    through[q] = q
                through[ev.i], through[ev.i + 1] = ev.i + 1, ev.i
            else:
                for q in range(1, wb + 1):
                    through[q] = q
            for q, q2 in through.items():
                self.bottom[(r - 1, q)] = ((r, q2), "top")
                self.top[(r, q2)] = ((r - 1, q), "bottom")

    def walk(self, start, going_down: bool):
        """Yield ``(segment, +1/-1)`` around the component of ``start``."""
        seg, down = start, going_down
        while True:
            yield seg, 1 if down else -1
            link = (self.bottom if down else self.top).get(seg)
            if link is None:
                return
            seg, end = link
            down = end == "top"
            if seg == start:
                return


def components(d: MorseDiagram) -> tuple[ComponentMap, StrandPartition]:
    """
    Trace components and the partition of component ids induced by ties.

    >>> cmap, part = components(MorseDiagram((Cup(1), Cap(1))))
    >>> cmap.count, str(part)
    (1, '{{1}}')
    """
    sg = _Segments(d)
    widths = sg.widths
    comp: dict = {}
    direction: dict = {}
    count = 0

    def trace(start, down):
        nonlocal count
        count += 1
        for seg, dr in sg.walk(start, down):
            comp[seg] = count
            direction[seg] = dr

    if not d.closed:
        for q in range(1, widths[0] + 1):
            if (0, q) not in comp:
                trace((0, q), True)
        last = len(d.rows)
        for q in range(1, widths[last] + 1):
            if (last, q) not in comp:
                trace((last, q), False)
    for r, ev in enumerate(d.rows, 1):
        if ev.kind == "cup" and (r, ev.i) not in comp:
            trace((r, ev.i), True)
    pairs = []
    for r, ev in enumerate(d.rows, 1):
        if ev.kind == "tie":
            pairs.append((comp[(r, ev.i)], comp[(r, ev.j)]))
    part = StrandPartition.from_pairs(count, pairs) if count else StrandPartition(())
    return ComponentMap(count, comp, direction, tuple(widths)), part


def crossings(d: MorseDiagram, cmap: ComponentMap | None = None) -> list[Crossing]:
    if cmap is None:
        cmap, _ = components(d)
    out = []
    for r, ev in enumerate(d.rows, 1):
        if ev.kind in CROSSINGS:
            a, b = (r, ev.i + 1), (r, ev.i)
            out.append(Crossing(r, ev.kind, cmap.comp[a], cmap.comp[b],
                                cmap.direction[a], cmap.direction[b]))
    return out


def close_braid(w: MonoidWord) -> MorseDiagram:
    """
    Closure with the return strands nested to the right of the braid body.

    >>> close_braid(MonoidWord.parse("p1", 2, "PM")).serialize().split("\\n")[:5]
    ['morse closed', 'cup 1', 'cup 2', 'p 1', 'cap 2']
    """
    if w.flavor is Flavor.TSM:
        raise InputError("TSM words must be mapped through mu before closing")
    n = w.n
    rows = [Cup(k) for k in range(1, n + 1)]
    for tok in w.tokens:
        if tok.kind == "e":
            rows.append(Tie(tok.index, tok.index + 1))
        else:
            rows.append(MorseEvent({"s": "x+", "S": "x-", "p": "p"}[tok.kind], tok.index))
    rows.extend(Cap(k) for k in range(n, 0, -1))
    return MorseDiagram(tuple(rows))


@dataclasses.dataclass(frozen=True)
class Resolution:
    """Chosen classical crossing (``x+``/``x-``) for each pre-crossing row."""

    choices: tuple[tuple[int, str], ...]


def enumerate_resolutions(d: MorseDiagram, max_precrossings: int = DEFAULT_MAX_PRECROSSINGS
                          ) -> Iterator[tuple[Resolution, MorseDiagram]]:
    """All 2^k resolutions in lexicographic order (row order, ``x+`` before ``x-``)."""
    d.widths()
    prows = d.precrossing_rows()
    if len(prows) > max_precrossings:
        raise ResolutionLimitError(
            f"{len(prows)} pre-crossings exceed the resolution limit of {max_precrossings}")
    for signs in itertools.product(("x+", "x-"), repeat=len(prows)):
        rows = list(d.rows)
        for r, kind in zip(prows, signs):
            rows[r - 1] = MorseEvent(kind, rows[r - 1].i)
        yield Resolution(tuple(zip(prows, signs))), MorseDiagram(tuple(rows), d.boundary)


def linking_vector(d: MorseDiagram) -> tuple[int, ...]:
    """
    Sorted pairwise linking numbers between distinct components, **doubled**
    (so +1 is stored as 2).

    >>> linking_vector(close_braid(MonoidWord.parse("s1 s1", 2, "B")))
    (2,)
    """
    if d.precrossing_rows():
        raise InputError("linking_vector needs a diagram without pre-crossings")
    cmap, _ = components(d)
    sums = Counter()
    for c in crossings(d, cmap):
        if c.comp_a != c.comp_b:
            sums[frozenset((c.comp_a, c.comp_b))] += c.sign()
    return tuple(sorted(sums[frozenset(pr)] for pr in itertools.combinations(range(1, cmap.count + 1), 2)))


def format_doubled(v: int) -> str:
    return f"{v:+d}/2" if v else "0/2"


@dataclasses.dataclass(frozen=True)
class InvariantFingerprint:
    """
    Component count, label-free tie partition of the components and the
    distribution of doubled linking vectors over all resolutions.
    """

    components: int
    partition: StrandPartition
    weights: tuple[tuple[tuple[int, ...], Fraction], ...]

    def weight_of(self, vector: Sequence[int]) -> Fraction:
        return dict(self.weights).get(tuple(vector), Fraction(0))

    def lines(self) -> list[str]:
        out = [f"components {self.components}", f"partition {self.partition}"]
        for vec, wt in self.weights:
            vals = " ".join(format_doubled(v) for v in vec)
            out.append(f"weight {wt} [{vals}]")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def fingerprint_from(ncomp: int, partition: StrandPartition, xs: Sequence[Crossing]) -> InvariantFingerprint:
    """Aggregate crossing data; pre-crossings contribute +/- their orientation with equal weight."""
    pairs = list(itertools.combinations(range(1, ncomp + 1), 2))
    slot = {pr: k for k, pr in enumerate(pairs)}
    base = [0] * len(pairs)
    pre = []
    for c in xs:
        if c.comp_a == c.comp_b:
            continue
        k = slot[tuple(sorted((c.comp_a, c.comp_b)))]
        if c.kind == "p":
            pre.append((k, c.orientation))
        else:
            base[k] += c.sign()
    dist = Counter({tuple(base): 1})
    for k, m in pre:
        nxt = Counter()
        for state, cnt in dist.items():
            for sgn in (1, -1):
                s2 = list(state)
                s2[k] += sgn * m
                nxt[tuple(s2)] += cnt
        dist = nxt
    total = sum(dist.values())
    agg = Counter()
    for state, cnt in dist.items():
        agg[tuple(sorted(state))] += cnt
    weights = tuple(sorted((vec, Fraction(cnt, total)) for vec, cnt in agg.items()))
    return InvariantFingerprint(ncomp, partition.canonical_shape(), weights)


def fingerprint(d: MorseDiagram, max_precrossings: int = DEFAULT_MAX_PRECROSSINGS) -> InvariantFingerprint:
    """
    Invariant fingerprint of a diagram.

    The resolution distribution is computed by convolving the contributions of
    the pre-crossings; it equals the aggregate of :func:`enumerate_resolutions`
    (which the tests check) without the 2^k blowup.
    """
    k = len(d.precrossing_rows())
    if k > max_precrossings:
        raise ResolutionLimitError(
            f"{k} pre-crossings exceed the resolution limit of {max_precrossings}")
    cmap, part = components(d)
    return fingerprint_from(cmap.count, part, crossings(d, cmap))


def fingerprint_by_enumeration(d: MorseDiagram, max_precrossings: int = DEFAULT_MAX_PRECROSSINGS
                               ) -> InvariantFingerprint:
    """Same value as :func:`fingerprint`, by explicit enumeration of every resolution."""
    cmap, part = components(d)
    agg = Counter()
    total = 0
    for _, res in enumerate_resolutions(d, max_precrossings):
        agg[linking_vector(res)] += 1
        total += 1
    weights = tuple(sorted((vec, Fraction(cnt, total)) for vec, cnt in agg.items()))
    return InvariantFingerprint(cmap.count, part.canonical_shape(), weights)


# local moves used by the property tests and by the braiding module

def insert_rows(d: MorseDiagram, after_row: int, events: Sequence[MorseEvent]) -> MorseDiagram:
    rows = list(d.rows)
    rows[after_row:after_row] = events
    return MorseDiagram(tuple(rows), d.boundary)


def insert_kink(d: MorseDiagram, after_row: int, pos: int, kind: str = "x+") -> MorseDiagram:
    """Put a curl (classical or pre-crossed) on the strand at ``pos`` below ``after_row``."""
    return insert_rows(d, after_row, (Cup(pos + 1), MorseEvent(kind, pos), Cap(pos + 1)))


def insert_r2(d: MorseDiagram, after_row: int, pos: int) -> MorseDiagram:
    """Slide strands ``pos`` and ``pos+1`` over each other and back."""
    return insert_rows(d, after_row, (CrossPos(pos), CrossNeg(pos)))
