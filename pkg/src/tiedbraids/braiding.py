"""
From closed diagrams to braid words, and L-moves on words.

Braiding follows the up-arc elimination scheme: after turning every
pre-crossing so that both of its strands run downward, each remaining up-arc
is cut into pieces whose classical crossings are all over (``o``) or all
under (``u``).  A piece running up from P to Q is replaced by two threads:
one from P down to the bottom and one from the top down to Q, both at the
right end of the braid and joined through the closure.  An ``o`` piece is
lifted above the rest of the diagram before it is moved, a ``u`` piece is
pushed below it.  Each piece gets its own height.  When the left one of two
same-side pieces has an end of the other in its sweep region, it must be
further from the diagram.
"""

from __future__ import annotations

import dataclasses
from graphlib import CycleError, TopologicalSorter

from .diagram import Cap, CROSSINGS, Cup, MorseDiagram, PreCross, _Segments, components
from .errors import InputError
from .monoid import Flavor, MonoidWord, Token, expand_generalized_tie


def orient_precrossings_down(d: MorseDiagram) -> MorseDiagram:
    """
    Rotate pre-crossings until both strands through each of them run downward.

    A pre-crossing with an upward strand is replaced by a cup, a pre-crossing
    one place to the right and a cap, which turns the crossing by a quarter.
    The inserted cup always lies below the topmost cup of its component, so
    the orientation of every strand is unchanged.
    """
    d.widths()
    while True:
        cmap, _ = components(d)
        for r, ev in enumerate(d.rows, 1):
            if ev.kind != "p":
                continue
            # a runs top-left to bottom-right, b top-right to bottom-left
            dir_a = cmap.direction[(r, ev.i + 1)]
            dir_b = cmap.direction[(r, ev.i)]
            if dir_a == 1 and dir_b == 1:
                continue
            i = ev.i
            if dir_a == -1 and dir_b == 1:
                rep = (Cup(i + 2), PreCross(i + 1), Cap(i))
            else:
                rep = (Cup(i), PreCross(i + 1), Cap(i + 2))
            rows = list(d.rows)
            rows[r - 1:r] = rep
            d = MorseDiagram(tuple(rows), d.boundary)
            break
        else:
            return d


@dataclasses.dataclass
class UpArc:
    """One piece of an up-arc; ``segs`` run bottom to top."""

    label: str
    segs: list
    bottom: tuple
    top: tuple
    comp: int
    crossings: list = dataclasses.field(default_factory=list)

    def level_pos(self) -> dict:
        return {lvl: q for lvl, q in self.segs}


def _y(end) -> tuple:
    # a total order on event rows and subdivision points matching the scan order
    if end[0] in ("cap", "cup"):
        return (end[1], 0, 0)
    return (end[1], 1, end[2])


def up_arcs(d: MorseDiagram, cmap=None, sg=None) -> list[UpArc]:
    """Pieces of the up-arcs of ``d``, each carrying crossings of one type only."""
    if cmap is None:
        cmap, _ = components(d)
    if sg is None:
        sg = _Segments(d)
    pieces = []
    for r, ev in enumerate(d.rows, 1):
        if ev.kind != "cap":
            continue
        a, b = (r - 1, ev.i), (r - 1, ev.i + 1)
        seg = a if cmap.direction[a] == -1 else b
        chain = [seg]
        marks = []  # (chain index below the crossing, over?, row)
        while True:
            nxt, end = sg.top[seg]
            if end == "top":
                break
            lvl, q = seg
            row_ev = d.rows[lvl - 1]
            if row_ev.kind in CROSSINGS and q in (row_ev.i, row_ev.i + 1):
                if row_ev.kind == "p":
                    raise AssertionError("pre-crossing on an up-arc after rotation")
                over = (q == row_ev.i + 1) == (row_ev.kind == "x+")
                marks.append((len(chain) - 1, over, lvl))
            chain.append(nxt)
            seg = nxt
        comp = cmap.comp[chain[0]]
        cup_row = chain[-1][0]
        if not marks:
            pieces.append(UpArc("u", chain, ("cap", r), ("cup", cup_row), comp))
            continue
        start, bottom = 0, ("cap", r)
        run = [marks[0]]
        for prev, cur in zip(marks, marks[1:] + [None]):
            if cur is not None and cur[1] == prev[1]:
                run.append(cur)
                continue
            if cur is None:
                top, stop = ("cup", cup_row), len(chain) - 1
            else:
                stop = prev[0] + 1
                top = ("sub",) + chain[stop]
            pieces.append(UpArc("o" if prev[1] else "u", chain[start:stop + 1], bottom, top, comp,
                                [m[2] for m in run]))
            if cur is not None:
                start, bottom, run = stop, top, [cur]
    return pieces


def _endpoint_right_of(end, piece_pos: dict, d: MorseDiagram) -> bool:
    if end[0] == "cap":
        return d.rows[end[1] - 1].i > piece_pos[end[1] - 1]
    if end[0] == "cup":
        return d.rows[end[1] - 1].i > piece_pos[end[1]]
    return end[2] > piece_pos[end[1]]


def _heights(d: MorseDiagram, pieces: list[UpArc]) -> list[int]:
    """Signed layer of each piece: positive above the diagram for ``o``, negative below for ``u``."""
    heights = [0] * len(pieces)
    for label, sign in (("o", 1), ("u", -1)):
        ids = [k for k, pc in enumerate(pieces) if pc.label == label]
        ts = TopologicalSorter()
        for k in ids:
            ts.add(k)
        for j in ids:
            pj = pieces[j]
            lo, hi = _y(pj.top), _y(pj.bottom)
            pos = pj.level_pos()
            for i in ids:
                if i == j:
                    continue
                for end in (pieces[i].bottom, pieces[i].top):
                    if lo < _y(end) < hi and _endpoint_right_of(end, pos, d):
                        ts.add(i, j)  # j further from the diagram than i
        try:
            order = list(ts.static_order())
        except CycleError as exc:
            raise InputError(f"cannot layer the up-arcs of this diagram: {exc}") from None
        for rank, k in enumerate(order):
            heights[k] = sign * (len(order) - rank)
    return heights


def braid_diagram(d: MorseDiagram) -> MonoidWord:
    """
    A TPM word whose closure is isotopic to the closed diagram ``d``.

    Ties are carried by component: each tie of ``d`` becomes a generalized tie
    at the bottom of the braid between two strands of the components it joins.
    """
    if not d.closed:
        raise InputError("braid_diagram needs a closed diagram")
    d = orient_precrossings_down(d)
    cmap, _ = components(d)
    if cmap.count == 0:
        raise InputError("the empty diagram has no braid form")
    sg = _Segments(d)
    pieces = up_arcs(d, cmap, sg)
    heights = _heights(d, pieces)
    direction = cmap.direction
    widths = cmap.widths

    cap_piece, cup_piece, subs = {}, {}, {}
    for k, pc in enumerate(pieces):
        if pc.bottom[0] == "cap":
            cap_piece[pc.bottom[1]] = k
        if pc.top[0] == "cup":
            cup_piece[pc.top[1]] = k
        else:
            # the piece below a subdivision point ends there; find the one above
            above = next(j for j, other in enumerate(pieces) if other.bottom == pc.top)
            subs.setdefault(pc.top[1], []).append((pc.top[2], k, above))
    for lst in subs.values():
        lst.sort()

    d_order = []
    for r, ev in enumerate(d.rows, 1):
        if ev.kind == "cap":
            d_order.append(cap_piece[r])
        for _, _, above in subs.get(r, ()):
            d_order.append(above)

    pos: list = list(d_order)  # None marks a downward strand of the diagram
    n = len(pos)
    tokens: list[Token] = []

    def over(t, x):
        if x is None:
            return pieces[t].label == "o"
        return heights[t] > heights[x]

    def move_left(a, b):
        t = pos[a]
        for idx in range(a - 1, b - 1, -1):
            x = pos[idx]
            tokens.append(Token("S" if over(t, x) else "s", idx + 1))
            pos[idx], pos[idx + 1] = t, x

    def move_right(a, b):
        t = pos[a]
        for idx in range(a, b):
            x = pos[idx + 1]
            tokens.append(Token("s" if over(t, x) else "S", idx + 1))
            pos[idx], pos[idx + 1] = x, t

    def downs_left(level, q):
        return sum(1 for k in range(1, q) if direction[(level, k)] == 1)

    ties = []
    for r, ev in enumerate(d.rows, 1):
        if ev.kind == "cup":
            dq = ev.i if direction[(r, ev.i)] == 1 else ev.i + 1
            k = downs_left(r, dq)
            move_left(pos.index(cup_piece[r]), k)
            pos[k] = None
        elif ev.kind == "cap":
            dq = ev.i if direction[(r - 1, ev.i)] == 1 else ev.i + 1
            k = downs_left(r - 1, dq)
            assert pos[k] is None
            pos[k] = cap_piece[r]
            move_right(k, n - 1)
        elif ev.kind in CROSSINGS:
            if direction[(r - 1, ev.i)] == 1 and direction[(r - 1, ev.i + 1)] == 1:
                k = downs_left(r - 1, ev.i)
                tokens.append(Token({"x+": "s", "x-": "S", "p": "p"}[ev.kind], k + 1))
        elif ev.kind == "tie":
            ties.append((cmap.comp[(r, ev.i)], cmap.comp[(r, ev.j)]))
        for q, below, above in subs.get(r, ()):
            k = downs_left(r, q)
            move_left(pos.index(below), k)
            pos[k] = above
            move_right(k, n - 1)
    assert pos == d_order and widths[-1] == 0

    comp_at = [pieces[k].comp for k in pos]
    for ca, cb in ties:
        if ca == cb:
            continue
        i, j = sorted((comp_at.index(ca) + 1, comp_at.index(cb) + 1))
        tokens.extend(expand_generalized_tie(i, j, n, Flavor.TPM).tokens)
    return MonoidWord(n, Flavor.TPM, tuple(tokens))


# L-moves

KINKS = ("none", "+", "-", "pre")


@dataclasses.dataclass(frozen=True)
class LMoveSpec:
    """
    Cut the strand at position ``strand`` in the gap before token ``slot`` and
    pull the two ends to a new rightmost strand, crossing everything ``over``
    or ``under``.  ``kink`` picks the crossing between the two new pieces.
    """

    slot: int
    strand: int
    kind: str = "over"
    kink: str = "none"

    def params(self) -> tuple:
        return (self.slot, self.strand, self.kind, self.kink)

    @classmethod
    def from_params(cls, params) -> LMoveSpec:
        slot, strand, kind, kink = params
        return cls(int(slot), int(strand), str(kind), str(kink))


def l_move_block(n: int, strand: int, kind: str, kink: str) -> tuple[Token, ...]:
    """
    Tokens inserted by an L-move on ``n`` strands (the result has ``n + 1``).

    >>> " ".join(t.ascii() for t in l_move_block(2, 1, "over", "none"))
    's1 s2 S1'
    """
    if kind not in ("over", "under"):
        raise InputError(f"L-move kind must be over or under, got {kind!r}")
    if kink not in KINKS:
        raise InputError(f"unknown kink {kink!r}")
    go, back = ("s", "S") if kind == "over" else ("S", "s")
    mid = {"none": Token(go, n), "+": Token("s", n), "-": Token("S", n), "pre": Token("p", n)}[kink]
    path = [Token(go, k) for k in range(strand, n)]
    ret = [Token(back, k) for k in range(n - 1, strand - 1, -1)]
    return tuple(path) + (mid,) + tuple(ret)


def _check_l_spec(w: MonoidWord, spec: LMoveSpec):
    if not 0 <= spec.slot <= len(w.tokens):
        raise InputError(f"slot {spec.slot} outside 0..{len(w.tokens)}")
    if not 1 <= spec.strand <= w.n:
        raise InputError(f"strand {spec.strand} outside 1..{w.n}")
    if spec.kink == "pre" and "p" not in w.flavor.kinds:
        raise InputError(f"pre-crossing kink not allowed in {w.flavor.value}")


def apply_l_move(w: MonoidWord, spec: LMoveSpec) -> MonoidWord:
    """
    >>> str(apply_l_move(MonoidWord(1, "PM"), LMoveSpec(0, 1, "over", "pre")))
    'p1'
    """
    _check_l_spec(w, spec)
    block = l_move_block(w.n, spec.strand, spec.kind, spec.kink)
    return MonoidWord(w.n + 1, w.flavor, w.tokens[:spec.slot] + block + w.tokens[spec.slot:])


def undo_l_move(w: MonoidWord, spec: LMoveSpec) -> MonoidWord:
    """Remove the block of ``spec`` at its slot; the rest must not touch the last strand."""
    if w.n < 2:
        raise InputError("nothing to remove on one strand")
    block = l_move_block(w.n - 1, spec.strand, spec.kind, spec.kink)
    if spec.kink == "pre" and "p" not in w.flavor.kinds:
        raise InputError(f"pre-crossing kink not allowed in {w.flavor.value}")
    if not 1 <= spec.strand <= w.n - 1:
        raise InputError(f"strand {spec.strand} outside 1..{w.n - 1}")
    end = spec.slot + len(block)
    if w.tokens[spec.slot:end] != block:
        raise InputError("L-move block not found at the given slot")
    rest = w.tokens[:spec.slot] + w.tokens[end:]
    if any(tok.index >= w.n - 1 for tok in rest):
        raise InputError("the remaining word still uses the last strand")
    return MonoidWord(w.n - 1, w.flavor, rest)


def l_destab_candidates(w: MonoidWord) -> list[tuple[LMoveSpec, MonoidWord]]:
    """Every way to undo one L-move whose block appears contiguously in ``w``."""
    out = []
    if w.n < 2:
        return out
    kinks = [k for k in KINKS if k != "pre" or "p" in w.flavor.kinds]
    for slot in range(len(w.tokens)):
        for strand in range(1, w.n):
            for kind in ("over", "under"):
                for kink in kinks:
                    spec = LMoveSpec(slot, strand, kind, kink)
                    try:
                        out.append((spec, undo_l_move(w, spec)))
                    except InputError:
                        pass
    return out
