"""
Bounded word-problem search over the monoid presentations.

The search runs over *normalized* words: a word is replaced by the
lexicographically least word reachable through commutation relations and
cancellation of adjacent inverse sigma pairs.  Edges are applications of
derived rules, i.e. the defining relations with invertible end letters moved
across the equals sign (``x A = B`` gives ``A = x^-1 B``).  Every derived rule
carries a recipe of primitive steps, so any path found expands into a chain of
single relation applications that :func:`replay` checks independently.
"""

from __future__ import annotations

import dataclasses
import collections
import functools
import heapq
from collections import deque
from typing import Iterable, Sequence

from .errors import InputError
from .monoid import Flavor, MonoidWord, Token, relations_of

KIND_CODE = {"s": 0, "S": 1, "p": 2, "t": 3, "e": 4}
CODE_KIND = "sSpte"

MAX_GAP = 6
BEST_DEPTH_WEIGHT = 1


def encode(tok: Token) -> int:
    return tok.index * 8 + KIND_CODE[tok.kind]


def decode(code: int) -> Token:
    return Token(CODE_KIND[code & 7], code >> 3)


def encode_word(tokens: Iterable[Token]) -> tuple[int, ...]:
    return tuple(encode(tok) for tok in tokens)


def decode_word(codes: Iterable[int]) -> tuple[Token, ...]:
    return tuple(decode(c) for c in codes)


def invertible(code: int) -> bool:
    return (code & 7) < 2


def inv(code: int) -> int:
    return code ^ 1


@dataclasses.dataclass(frozen=True)
class Rule:
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]
    # primitive steps (relation index, +1 forward / -1 backward, offset from match start)
    recipe: tuple[tuple[int, int, int], ...]


def _shift(recipe, d):
    return tuple((k, dr, off + d) for k, dr, off in recipe)


class RewriteSystem:
    """Derived rules, commutation data and normal forms for one (flavor, n)."""

    def __init__(self, flavor: Flavor, n: int):
        self.flavor = flavor
        self.n = n
        rels = relations_of(flavor, n)
        self.relations = [(encode_word(r.lhs), encode_word(r.rhs), r.name) for r in rels]
        self.relation_index = {}
        for k, (lhs, rhs, _) in enumerate(self.relations):
            self.relation_index[(lhs, rhs)] = k
        self.rules = self._derive_rules()
        self.commute = set()
        for rule in self.rules:
            if len(rule.lhs) == 2 and rule.rhs == rule.lhs[::-1] and rule.lhs[0] != rule.lhs[1]:
                self.commute.add(rule.lhs)
        self.comm_of = collections.defaultdict(frozenset)
        for a, b in self.commute:
            self.comm_of[a] = self.comm_of[a] | {b}
        self._comm_rule = {r.lhs: r for r in self.rules if r.lhs in self.commute and r.rhs == r.lhs[::-1]}
        self.by_first: dict[int, list[int]] = {}
        for idx, rule in enumerate(self.rules):
            if rule.lhs:
                self.by_first.setdefault(rule.lhs[0], []).append(idx)
        self._nf_cache: dict[tuple[int, ...], tuple[int, ...]] = {}

    @classmethod
    @functools.lru_cache(maxsize=None)
    def get(cls, flavor: Flavor, n: int) -> RewriteSystem:
        return cls(Flavor(flavor), n)

    def _inverse_rel(self, a, b):
        return self.relation_index[((a, b), ())]

    def _derive_rules(self) -> list[Rule]:
        seen = {}
        queue = deque()

        def push(lhs, rhs, recipe):
            if lhs == rhs or (lhs, rhs) in seen:
                return
            rule = Rule(lhs, rhs, recipe)
            seen[(lhs, rhs)] = rule
            queue.append(rule)

        for k, (lhs, rhs, _) in enumerate(self.relations):
            push(lhs, rhs, ((k, 1, 0),))
            push(rhs, lhs, ((k, -1, 0),))
        while queue:
            r = queue.popleft()
            lhs, rhs, rec = r.lhs, r.rhs, r.recipe
            if lhs and invertible(lhs[0]):
                x = lhs[0]
                push(lhs[1:], (inv(x),) + rhs, ((self._inverse_rel(inv(x), x), -1, 0),) + _shift(rec, 1))
            if lhs and invertible(lhs[-1]):
                y = lhs[-1]
                push(lhs[:-1], rhs + (inv(y),),
                     ((self._inverse_rel(y, inv(y)), -1, len(lhs) - 1),) + rec)
            if rhs and invertible(rhs[0]):
                x = rhs[0]
                push((inv(x),) + lhs, rhs[1:], _shift(rec, 1) + ((self._inverse_rel(inv(x), x), 1, 0),))
            if rhs and invertible(rhs[-1]):
                y = rhs[-1]
                push(lhs + (inv(y),), rhs[:-1], rec + ((self._inverse_rel(y, inv(y)), 1, len(rhs) - 1),))
        return list(seen.values())

    # primitive steps are (old, new, position) triples of code tuples

    def expand_recipe(self, recipe, base, out: list | None):
        if out is None:
            return
        for k, dr, off in recipe:
            lhs, rhs, _ = self.relations[k]
            old, new = (lhs, rhs) if dr > 0 else (rhs, lhs)
            out.append((old, new, base + off))

    def commutes(self, a: int, b: int) -> bool:
        return (a, b) in self.commute

    def _swap(self, w: list, pos: int, record):
        a, b = w[pos], w[pos + 1]
        if record is not None:
            self.expand_recipe(self._comm_rule[(a, b)].recipe, pos, record)
        w[pos], w[pos + 1] = b, a

    def normal_form(self, word: Sequence[int], record: list | None = None) -> tuple[int, ...]:
        """Lex-least commutation representative with inverse pairs cancelled."""
        word = tuple(word)
        if record is None:
            hit = self._nf_cache.get(word)
            if hit is not None:
                return hit
        w = list(word)
        while True:
            self._lex_sort(w, record)
            if not self._cancel_once(w, record):
                break
        out = tuple(w)
        if record is None:
            if len(self._nf_cache) > 2_000_000:
                self._nf_cache.clear()
            self._nf_cache[word] = out
        return out

    def _lex_order(self, w: Sequence[int]) -> list[int]:
        """Positions of ``w`` in lex-least order among its commutation class (Kahn with a heap)."""
        cs = self.comm_of
        L = len(w)
        indeg = [0] * L
        succ: list[list[int]] = [[] for _ in range(L)]
        for q in range(1, L):
            c = cs[w[q]]
            for r in range(q):
                if w[r] not in c:
                    succ[r].append(q)
                    indeg[q] += 1
        heap = [(w[q], q) for q in range(L) if not indeg[q]]
        heapq.heapify(heap)
        order = []
        while heap:
            _, q = heapq.heappop(heap)
            order.append(q)
            for nxt in succ[q]:
                indeg[nxt] -= 1
                if not indeg[nxt]:
                    heapq.heappush(heap, (w[nxt], nxt))
        return order

    def _lex_sort(self, w: list, record):
        order = self._lex_order(w)
        if record is None:
            w[:] = [w[q] for q in order]
            return
        # bubble into place; every swapped pair is an inverted, hence commuting, pair
        cur = list(range(len(w)))
        for tpos, orig in enumerate(order):
            q = cur.index(orig)
            while q > tpos:
                self._swap(w, q - 1, record)
                cur[q - 1], cur[q] = cur[q], cur[q - 1]
                q -= 1

    def _cancel_once(self, w: list, record) -> bool:
        cs = self.comm_of
        for i in range(len(w)):
            x = w[i]
            if not invertible(x):
                continue
            y = inv(x)
            c = cs[x]
            for j in range(i + 1, len(w)):
                if w[j] == y:
                    for q in range(i, j - 1):
                        self._swap(w, q, record)
                    if record is not None:
                        record.append(((x, y), (), j - 1))
                    del w[j - 1:j + 1]
                    return True
                if w[j] not in c:
                    break
        return False

    def occurrences(self, w: Sequence[int], lhs: Sequence[int]):
        """
        Occurrences of ``lhs`` as a factor of the trace of ``w``.

        Yields ``(chosen, before, after)``: the matched positions and the
        skipped window positions that move in front of / behind the match.
        """
        k = len(lhs)
        L = len(w)
        if k == 0:
            return
        for p1 in range(L):
            if w[p1] != lhs[0]:
                continue
            if k == 1:
                yield (p1,), (), ()
                continue
            stack = [(p1,)]
            while stack:
                chosen = stack.pop()
                m = len(chosen)
                if m == k:
                    split = self._split_window(w, chosen)
                    if split is not None:
                        yield chosen, split[0], split[1]
                    continue
                skipped = chosen[-1] - chosen[0] + 1 - m
                last = chosen[-1]
                for q in range(min(L - 1, last + 1 + MAX_GAP - skipped), last, -1):
                    if w[q] == lhs[m]:
                        stack.append(chosen + (q,))

    def _split_window(self, w, chosen):
        cs = self.comm_of
        cset = set(chosen)
        before, after = [], []
        for q in range(chosen[0] + 1, chosen[-1]):
            if q in cset:
                continue
            c = cs[w[q]]
            blocked = any(w[k] not in c for k in chosen if k < q) or any(w[b] not in c for b in after)
            (after if blocked else before).append(q)
        for b in after:
            c = cs[w[b]]
            if any(w[k] not in c for k in chosen if k > b):
                return None
        return before, after

    def rearrange(self, w: list, chosen, before, after, record):
        """Permute the window so the chosen letters become contiguous; return match start."""
        start = chosen[0]
        target = list(before) + list(chosen) + list(after)
        cur = list(range(start, chosen[-1] + 1))
        for tpos, orig in enumerate(target):
            q = cur.index(orig)
            while q > tpos:
                self._swap(w, start + q - 1, record)
                cur[q - 1], cur[q] = cur[q], cur[q - 1]
                q -= 1
        return start + len(before)

    def apply_rule(self, w: Sequence[int], rule_idx: int, match, record=None) -> tuple[int, ...]:
        rule = self.rules[rule_idx]
        chosen, before, after = match
        work = list(w)
        at = self.rearrange(work, chosen, before, after, record)
        self.expand_recipe(rule.recipe, at, record)
        work[at:at + len(rule.lhs)] = rule.rhs
        return tuple(work)

    def neighbors(self, w: tuple[int, ...], max_len: int, max_index: int | None = None):
        """Normalized one-rule neighbors as ``(state, (rule_idx, match))``."""
        seen = set()
        for c in sorted(set(w)):
            for idx in self.by_first.get(c, ()):
                rule = self.rules[idx]
                if len(w) - len(rule.lhs) + len(rule.rhs) > max_len + 2:
                    continue
                if max_index is not None and any((x >> 3) > max_index for x in rule.rhs):
                    continue
                for match in self.occurrences(w, rule.lhs):
                    raw = self.apply_rule(w, idx, match)
                    nf = self.normal_form(raw)
                    if len(nf) > max_len or nf == w or nf in seen:
                        continue
                    seen.add(nf)
                    yield nf, (idx, match)


def apply_steps(codes: tuple[int, ...], steps) -> tuple[int, ...]:
    w = tuple(codes)
    for old, new, pos in steps:
        if w[pos:pos + len(old)] != old:
            raise AssertionError(f"step {old}->{new} does not match at {pos}")
        w = w[:pos] + new + w[pos + len(old):]
    return w


def reverse_steps(steps):
    return [(new, old, pos) for old, new, pos in reversed(steps)]


@dataclasses.dataclass(frozen=True)
class Step:
    """One certificate line: a move, its parameters and the word it produced."""

    kind: str
    params: tuple
    result: MonoidWord

    def line(self) -> str:
        params = " ".join(str(x) for x in self.params)
        return f"{self.kind} {params} -> n={self.result.n} {self.result.ascii() or '1'}".replace("  ", " ")


@dataclasses.dataclass(frozen=True)
class RewritePath:
    """A chain of relation applications from ``start`` to ``end``."""

    start: MonoidWord
    steps: tuple[Step, ...]

    @property
    def end(self) -> MonoidWord:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def serialize(self) -> str:
        return "".join(step.line() + "\n" for step in self.steps)


def _fmt(codes):
    return "".join(decode(c).ascii() + "." for c in codes).rstrip(".") or "1"


def steps_to_certificate(start: MonoidWord, steps) -> RewritePath:
    names = {}
    for lhs, rhs, name in RewriteSystem.get(start.flavor, start.n).relations:
        names[(lhs, rhs)] = names[(rhs, lhs)] = name
    out = []
    w = encode_word(start.tokens)
    for old, new, pos in steps:
        w = apply_steps(w, [(old, new, pos)])
        out.append(Step("relation-rewrite", (names[(old, new)], f"@{pos}", _fmt(old), "=>", _fmt(new)),
                        start.with_tokens(decode_word(w))))
    return RewritePath(start, tuple(out))


def parse_rewrite_params(params) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    _, at, old, _, new = params

    def codes(text):
        if text == "1":
            return ()
        from .monoid import parse_token
        return tuple(encode(parse_token(x)) for x in text.split("."))

    return codes(old), codes(new), int(at[1:])


def check_rewrite_step(prev: MonoidWord, step: Step) -> bool:
    """True when ``step`` is one application of a defining relation of ``prev``'s monoid."""
    if step.kind != "relation-rewrite" or step.result.n != prev.n or step.result.flavor != prev.flavor:
        return False
    old, new, pos = parse_rewrite_params(step.params)
    if prev.n < 2:
        return False
    known = RewriteSystem.get(prev.flavor, prev.n).relation_index
    if (old, new) not in known and (new, old) not in known:
        return False
    w = encode_word(prev.tokens)
    if w[pos:pos + len(old)] != old:
        return False
    return w[:pos] + new + w[pos + len(old):] == encode_word(step.result.tokens)


def replay(path: RewritePath) -> MonoidWord:
    """Check every step of ``path`` and return its end word; raises on a bad step."""
    w = path.start
    for k, step in enumerate(path.steps):
        if not check_rewrite_step(w, step):
            raise AssertionError(f"step {k} is not a relation application: {step.line()}")
        w = step.result
    return w


def _bfs_path(parents, state):
    edges = []
    while True:
        parent, edge = parents[state]
        if parent is None:
            break
        edges.append((parent, edge))
        state = parent
    edges.reverse()
    return edges


def bidirectional_search(s1, s2, expand, budget: int, strategy: str = "best", key=len):
    """
    Bidirectional search between two states.

    ``expand(state)`` yields ``(neighbor, edge)``.  ``bfs`` expands whole
    layers, smaller frontier first.  ``best`` always expands the unexpanded
    state with the least ``key(state) + BEST_DEPTH_WEIGHT * depth`` on the side
    whose best candidate is smaller, which reaches the long conjugated words of
    generalized ties much sooner.  Both stop after ``budget`` distinct states.
    Returns ``(forward parents, backward parents, meeting state)`` or ``None``.
    Ties are broken by state order, so results do not depend on timing.
    """
    fwd = {s1: (None, None)}
    bwd = {s2: (None, None)}
    if s1 == s2:
        return fwd, bwd, s1
    maps = (fwd, bwd)
    if strategy == "bfs":
        frontiers = [[s1], [s2]]
        while frontiers[0] and frontiers[1]:
            side = 0 if len(frontiers[0]) <= len(frontiers[1]) else 1
            mine, other = maps[side], maps[1 - side]
            nxt = []
            for state in frontiers[side]:
                for nb, edge in expand(state):
                    if nb in mine:
                        continue
                    mine[nb] = (state, edge)
                    if nb in other:
                        return fwd, bwd, nb
                    if len(fwd) + len(bwd) >= budget:
                        return None
                    nxt.append(nb)
            frontiers[side] = nxt
        return None
    if strategy != "best":
        raise InputError(f"unknown search strategy {strategy!r}")
    lam = BEST_DEPTH_WEIGHT
    heaps = [[(key(s1), 0, s1)], [(key(s2), 0, s2)]]
    while heaps[0] and heaps[1]:
        side = 0 if heaps[0][0] <= heaps[1][0] else 1
        mine, other = maps[side], maps[1 - side]
        _, depth, state = heapq.heappop(heaps[side])
        for nb, edge in expand(state):
            if nb in mine:
                continue
            mine[nb] = (state, edge)
            if nb in other:
                return fwd, bwd, nb
            if len(fwd) + len(bwd) >= budget:
                return None
            heapq.heappush(heaps[side], (key(nb) + lam * (depth + 1), depth + 1, nb))
    return None


def search_path(parents, state):
    """Edges ``(parent, edge)`` from the root of ``parents`` to ``state``."""
    return _bfs_path(parents, state)


def words_equal_in_monoid(w1: MonoidWord, w2: MonoidWord, budget: int = 100_000,
                          slack: int = 4, strategy: str = "best") -> RewritePath | None:
    """
    Search for a chain of relation applications turning ``w1`` into ``w2``.

    Returns the chain (which replays step by step) or ``None`` once ``budget``
    distinct normalized words have been visited.  ``None`` never means the
    words differ.
    """
    if (w1.n, w1.flavor) != (w2.n, w2.flavor):
        raise InputError("words_equal_in_monoid needs the same n and flavor")
    if w1 == w2:
        return RewritePath(w1, ())
    if w1.n < 2:
        return None
    system = RewriteSystem.get(w1.flavor, w1.n)
    c1, c2 = encode_word(w1.tokens), encode_word(w2.tokens)
    s1, s2 = system.normal_form(c1), system.normal_form(c2)
    max_len = max(len(c1), len(c2)) + slack

    found = bidirectional_search(s1, s2, lambda st: system.neighbors(st, max_len), budget, strategy)
    if found is None:
        return None
    fwd, bwd, meet = found

    steps: list = []
    system.normal_form(c1, steps)
    for parent, (idx, match) in _bfs_path(fwd, meet):
        raw = system.apply_rule(parent, idx, match, steps)
        system.normal_form(raw, steps)
    back: list = []
    system.normal_form(c2, back)
    for parent, (idx, match) in _bfs_path(bwd, meet):
        raw = system.apply_rule(parent, idx, match, back)
        system.normal_form(raw, back)
    steps.extend(reverse_steps(back))
    path = steps_to_certificate(w1, steps)
    if path.end != w2:
        raise AssertionError("internal error: certificate does not end at the target word")
    return path
