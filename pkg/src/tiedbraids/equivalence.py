"""
Closure equivalence of braid words: Markov-type moves, L-moves and a bounded
certificate search.

Every move is an exact, invertible operation on words, and
:func:`apply_move` checks its side conditions.  A certificate is a list of
moves with the word each one produced, so it can be replayed and checked
without trusting the search that found it.

Move kinds and their parameters (as they appear in certificates)::

    relation-rewrite    <name> @<pos> <old> => <new>
    conjugation         wrap|unwrap|head-to-tail|tail-to-head <token>
    commuting           head-to-tail|tail-to-head <p token>
    singular-commuting  head-to-tail|tail-to-head <tau token>
    real-stab+ / real-stab-      (appends sigma_n^{+1} / sigma_n^{-1})
    real-destab         <token>
    pseudo-stab / pseudo-destab
    t-stab / t-destab   <i> <j>
    l-move / l-destab   <slot> <strand> over|under none|+|-|pre
"""

from __future__ import annotations

import dataclasses
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator

from .braiding import KINKS, LMoveSpec, apply_l_move, l_move_block, undo_l_move
from .diagram import DEFAULT_MAX_PRECROSSINGS, InvariantFingerprint, close_braid, fingerprint
from .errors import InputError
from .monoid import (
    Flavor,
    MonoidWord,
    Token,
    expand_generalized_tie,
    map_flavor_mu,
    parse_token,
    permutation_of,
    rewrite_neighbors,
)
from .rewriting import (
    RewriteSystem,
    Step,
    _fmt,
    bidirectional_search,
    check_rewrite_step,
    encode_word,
    decode_word,
    parse_rewrite_params,
    search_path,
)

MOVE_KINDS = (
    "relation-rewrite", "conjugation", "commuting", "singular-commuting",
    "real-stab+", "real-stab-", "real-destab", "pseudo-stab", "pseudo-destab",
    "t-stab", "t-destab", "l-move", "l-destab",
)
CONJ_MODES = ("theorem", "full")
DEFAULT_BUDGET = 200_000
DEFAULT_SLACK = 8
DEFAULT_EXTRA_STRANDS = 3

_INVERSE_MODE = {"wrap": "unwrap", "unwrap": "wrap", "head-to-tail": "tail-to-head", "tail-to-head": "head-to-tail"}


@dataclasses.dataclass(frozen=True)
class Move:
    """A move kind with its parameters; ``str`` gives the short label, e.g. ``t-stab(1,2)``."""

    kind: str
    params: tuple = ()

    def __str__(self):
        if self.kind in ("t-stab", "t-destab"):
            return f"{self.kind}({self.params[0]},{self.params[1]})"
        return self.kind


@dataclasses.dataclass(frozen=True)
class Limits:
    """Pruning bounds for neighbor generation."""

    max_n: int
    max_len: int

    @classmethod
    def around(cls, *words: MonoidWord, extra_strands: int = DEFAULT_EXTRA_STRANDS,
               slack: int = DEFAULT_SLACK) -> Limits:
        return cls(max(w.n for w in words) + extra_strands, max(len(w) for w in words) + slack)


# single moves


def _cycle_kind(flavor: Flavor, tok: Token, mode: str) -> str | None:
    """Which move moves ``tok`` between the two ends of a word, if any."""
    if tok.kind in "sS":
        return "conjugation"
    if tok.kind == "p":
        return "commuting"
    if tok.kind == "t":
        return "singular-commuting"
    # ties: conjugation by elements of the tied monoid is part of the tied and
    # tied singular theorems only
    if mode == "full" or flavor in (Flavor.TM, Flavor.TSM):
        return "conjugation"
    return None


def _tok(text) -> Token:
    return parse_token(str(text))


def _only_user_of_last(w: MonoidWord, idx: int) -> bool:
    return sum(1 for tok in w.tokens if tok.index == w.n - 1) == 1 and w.tokens[idx].index == w.n - 1


def apply_move(w: MonoidWord, kind: str, params: tuple = (), mode: str = "theorem") -> MonoidWord:
    """
    Apply one move to ``w``, checking every side condition.

    >>> str(apply_move(MonoidWord.parse("s1", 2, "TM"), "t-stab", (1, 2)))
    'σ1 η1'
    >>> str(apply_move(MonoidWord.parse("p1 s1", 2, "TPM"), "commuting", ("head-to-tail", "p1")))
    'σ1 p1'
    """
    if mode not in CONJ_MODES:
        raise InputError(f"unknown conjugation mode {mode!r}")
    flavor, n, toks = w.flavor, w.n, w.tokens
    if kind == "relation-rewrite":
        old, new, pos = parse_rewrite_params(params)
        codes = encode_word(toks)
        if w.n >= 2 and 0 <= pos <= len(codes) and codes[pos:pos + len(old)] == old:
            out = w.with_tokens(decode_word(codes[:pos] + new + codes[pos + len(old):]))
            if check_rewrite_step(w, Step(kind, tuple(params), out)):
                return out
        raise InputError(f"relation-rewrite {' '.join(map(str, params))} does not apply")
    if kind in ("conjugation", "commuting", "singular-commuting"):
        how, x = params[0], _tok(params[1])
        if how == "wrap" or how == "unwrap":
            if kind != "conjugation" or not x.invertible or not 1 <= x.index < n:
                raise InputError(f"{how} needs a sigma generator, got {x}")
            if how == "wrap":
                return w.with_tokens((x,) + toks + (x.inverse(),))
            if len(toks) < 2 or toks[0] != x or toks[-1] != x.inverse():
                raise InputError(f"word is not wrapped by {x}")
            return w.with_tokens(toks[1:-1])
        if how not in ("head-to-tail", "tail-to-head"):
            raise InputError(f"unknown cycling mode {how!r}")
        if _cycle_kind(flavor, x, mode) != kind:
            raise InputError(f"{kind} cannot move {x} in {flavor.value} ({mode} mode)")
        if how == "head-to-tail":
            if not toks or toks[0] != x:
                raise InputError(f"word does not start with {x}")
            return w.with_tokens(toks[1:] + (x,))
        if not toks or toks[-1] != x:
            raise InputError(f"word does not end with {x}")
        return w.with_tokens((x,) + toks[:-1])
    if kind in ("real-stab+", "real-stab-"):
        return MonoidWord(n + 1, flavor, toks + (Token("s" if kind == "real-stab+" else "S", n),))
    if kind == "pseudo-stab":
        if "p" not in flavor.kinds:
            raise InputError(f"pseudo-stabilization is not a move of {flavor.value}")
        return MonoidWord(n + 1, flavor, toks + (Token("p", n),))
    if kind in ("real-destab", "pseudo-destab"):
        if kind == "pseudo-destab" and "p" not in flavor.kinds:
            raise InputError(f"pseudo-destabilization is not a move of {flavor.value}")
        want = "sS" if kind == "real-destab" else "p"
        if n < 2 or not toks or toks[-1].kind not in want or not _only_user_of_last(w, len(toks) - 1):
            raise InputError(f"{kind} needs a final generator on the last strand used nowhere else")
        if kind == "real-destab" and toks[-1] != _tok(params[0]):
            raise InputError(f"word does not end with {params[0]}")
        return MonoidWord(n - 1, flavor, toks[:-1])
    if kind in ("t-stab", "t-destab"):
        if not flavor.has_ties:
            raise InputError(f"t-stabilization is not a move of {flavor.value}")
        i, j = int(params[0]), int(params[1])
        if i == j or not (1 <= i <= n and 1 <= j <= n):
            raise InputError(f"t-stabilization needs distinct strands in 1..{n}, got ({i},{j})")
        tie = expand_generalized_tie(min(i, j), max(i, j), n, flavor).tokens
        if kind == "t-stab":
            base = w
        else:
            if toks[len(toks) - len(tie):] != tie:
                raise InputError(f"word does not end with the tie ({i},{j})")
            base = w.with_tokens(toks[:len(toks) - len(tie)])
        if permutation_of(base)(i) != j:
            raise InputError(f"t-stabilization ({i},{j}) needs s({i}) = {j}")
        return w.with_tokens(toks + tie) if kind == "t-stab" else base
    if kind == "l-move":
        return apply_l_move(w, LMoveSpec.from_params(params))
    if kind == "l-destab":
        return undo_l_move(w, LMoveSpec.from_params(params))
    raise InputError(f"unknown move kind {kind!r}")


def inverse_move(kind: str, params: tuple, before: MonoidWord) -> tuple[str, tuple]:
    """The move undoing ``(kind, params)`` applied to ``before``."""
    params = tuple(params)
    if kind == "relation-rewrite":
        name, at, old, arrow, new = params
        return kind, (name, at, new, arrow, old)
    if kind in ("conjugation", "commuting", "singular-commuting"):
        return kind, (_INVERSE_MODE[params[0]],) + params[1:]
    if kind in ("real-stab+", "real-stab-"):
        return "real-destab", (("s" if kind == "real-stab+" else "S") + str(before.n),)
    if kind == "real-destab":
        return ("real-stab+" if _tok(params[0]).kind == "s" else "real-stab-"), ()
    pairs = {"pseudo-stab": "pseudo-destab", "t-stab": "t-destab", "l-move": "l-destab"}
    pairs.update({v: k for k, v in pairs.items()})
    if kind in pairs:
        return pairs[kind], params
    raise InputError(f"unknown move kind {kind!r}")


def markov_neighbors(w: MonoidWord, limits: Limits | None = None, mode: str = "theorem"
                     ) -> set[tuple[Move, MonoidWord]]:
    """
    Every word one Markov-type move away from ``w`` (relation rewrites
    included), pruned by ``limits``.

    >>> w = MonoidWord.parse("s1", 2, "PM")
    >>> (Move("pseudo-stab"), MonoidWord.parse("s1 p2", 3, "PM")) in markov_neighbors(w)
    True
    """
    if limits is None:
        limits = Limits.around(w)
    flavor, n, toks = w.flavor, w.n, w.tokens
    out: set[tuple[Move, MonoidWord]] = set()

    def add(kind, params=()):
        try:
            nb = apply_move(w, kind, params, mode)
        except InputError:
            return
        if nb.n <= limits.max_n and len(nb) <= limits.max_len:
            out.add((Move(kind, tuple(params)), nb))

    for nb in rewrite_neighbors(w):
        if len(nb) <= limits.max_len:
            out.add((Move("relation-rewrite"), nb))
    for i in range(1, n):
        for k in "sS":
            add("conjugation", ("wrap", f"{k}{i}"))
    if toks:
        add("conjugation", ("unwrap", toks[0].ascii()))
        for how, x in (("head-to-tail", toks[0]), ("tail-to-head", toks[-1])):
            kind = _cycle_kind(flavor, x, mode)
            if kind:
                add(kind, (how, x.ascii()))
        add("real-destab", (toks[-1].ascii(),))
    for kind in ("real-stab+", "real-stab-", "pseudo-stab", "pseudo-destab"):
        add(kind)
    if flavor.has_ties:
        perm = permutation_of(w)
        for i in range(1, n + 1):
            if perm(i) != i:
                add("t-stab", (i, perm(i)))
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                if i != j:
                    add("t-destab", (i, j))
    return out


# certificates


@dataclasses.dataclass(frozen=True)
class EquivalenceCertificate:
    """A replayable sequence of moves from ``start``; ``mode`` is the conjugation gate in force."""

    start: MonoidWord
    steps: tuple[Step, ...] = ()
    mode: str = "theorem"

    @property
    def end(self) -> MonoidWord:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self):
        return len(self.steps)

    def kinds(self) -> list[str]:
        return [step.kind for step in self.steps]

    def serialize(self) -> str:
        return "".join(step.line() + "\n" for step in self.steps)


def replay(cert: EquivalenceCertificate) -> MonoidWord:
    """Re-apply every move of ``cert``; raises if any move or recorded word disagrees."""
    w = cert.start
    for k, step in enumerate(cert.steps):
        got = apply_move(w, step.kind, step.params, cert.mode)
        if got != step.result:
            raise AssertionError(f"step {k} produces {got}, certificate says {step.result}")
        w = got
    return w


_TAU = re.compile(r"(?<![a-z-])t(\d+)")


def map_certificate_mu(cert: EquivalenceCertificate) -> EquivalenceCertificate:
    """Image of a TSM certificate in TPM: tau becomes p, singular-commuting becomes commuting."""
    steps = []
    for step in cert.steps:
        kind = "commuting" if step.kind == "singular-commuting" else step.kind
        params = tuple(
            x if (k == 0 and step.kind == "relation-rewrite") or not isinstance(x, str) else _TAU.sub(r"p\1", x)
            for k, x in enumerate(step.params))
        steps.append(Step(kind, params, map_flavor_mu(step.result)))
    return EquivalenceCertificate(map_flavor_mu(cert.start), tuple(steps), cert.mode)


class _Trail:
    """A concrete word being pushed through moves, recording each one."""

    def __init__(self, word: MonoidWord, mode: str):
        self.word = word
        self.mode = mode
        self.steps: list[Step] = []

    def push(self, kind, params):
        self.word = apply_move(self.word, kind, params, self.mode)
        self.steps.append(Step(kind, tuple(params), self.word))

    def relations(self, raw):
        if not raw:
            return
        names = _relation_names(self.word.flavor, self.word.n)
        for old, new, pos in raw:
            self.push("relation-rewrite", (names[(old, new)], f"@{pos}", _fmt(old), "=>", _fmt(new)))

    def codes(self):
        return encode_word(self.word.tokens)


def _relation_names(flavor, n):
    names = {}
    for lhs, rhs, name in RewriteSystem.get(flavor, n).relations:
        names[(lhs, rhs)] = names[(rhs, lhs)] = name
    return names


# search over normalized words


class _Searcher:
    def __init__(self, flavor: Flavor, moves: str, limits: Limits, mode: str, threads: int = 1):
        if moves not in ("markov", "lmove"):
            raise InputError(f"move set must be markov or lmove, got {moves!r}")
        self.flavor = flavor
        self.moves = moves
        self.limits = limits
        self.mode = mode
        self.threads = max(1, int(threads))
        self.kinks = [k for k in KINKS if k != "pre" or "p" in flavor.kinds]

    def system(self, n):
        return RewriteSystem.get(self.flavor, n) if n >= 2 else None

    def nf(self, n, codes, record=None):
        sysn = self.system(n)
        return tuple(codes) if sysn is None else sysn.normal_form(codes, record)

    def state_of(self, w: MonoidWord):
        return (w.n, self.nf(w.n, encode_word(w.tokens)))

    # preparation: reorder a normalized word by commutations only

    def prepare(self, n, w, prep, record=None):
        lst = list(w)
        if prep is None:
            return lst, None
        sysn = self.system(n)
        tag = prep[0]
        if tag == "front":
            for k in range(prep[1] - 1, -1, -1):
                sysn._swap(lst, k, record)
            return lst, 0
        if tag == "back":
            for k in range(prep[1], len(lst) - 1):
                sysn._swap(lst, k, record)
            return lst, len(lst) - 1
        at = sysn.rearrange(lst, *prep[1:], record)
        return lst, at

    def movable(self, n, w):
        """Positions that commute to the front, and to the back."""
        sysn = self.system(n)
        if sysn is None:
            return [], []
        cs = sysn.comm_of
        front = [q for q in range(len(w)) if all(w[r] in cs[w[q]] for r in range(q))]
        back = [q for q in range(len(w)) if all(w[r] in cs[w[q]] for r in range(q + 1, len(w)))]
        return front, back

    def move_candidates(self, state) -> Iterator[tuple[object, str, tuple]]:
        """``(prep, kind, params)`` for every move tried from ``state``."""
        n, w = state
        lim = self.limits
        toks = decode_word(w)
        front, back = self.movable(n, w)
        markov = self.moves == "markov"
        for q in front:
            kind = _cycle_kind(self.flavor, toks[q], self.mode)
            if kind and (kind != "conjugation" or not toks[q].invertible) and (markov or kind != "conjugation"):
                yield ("front", q), kind, ("head-to-tail", toks[q].ascii())
        for q in back:
            kind = _cycle_kind(self.flavor, toks[q], self.mode)
            if kind and (kind != "conjugation" or not toks[q].invertible) and (markov or kind != "conjugation"):
                yield ("back", q), kind, ("tail-to-head", toks[q].ascii())
        if markov:
            if len(w) + 2 <= lim.max_len:
                for i in range(1, n):
                    for k in "sS":
                        yield None, "conjugation", ("wrap", f"{k}{i}")
            if n + 1 <= lim.max_n and len(w) + 1 <= lim.max_len:
                yield None, "real-stab+", ()
                yield None, "real-stab-", ()
                if "p" in self.flavor.kinds:
                    yield None, "pseudo-stab", ()
            users = [q for q in range(len(w)) if toks[q].index == n - 1]
            if len(users) == 1 and users[0] in back:
                tok = toks[users[0]]
                if tok.kind in "sS":
                    yield ("back", users[0]), "real-destab", (tok.ascii(),)
                elif tok.kind == "p":
                    yield ("back", users[0]), "pseudo-destab", ()
        else:
            if n + 1 <= lim.max_n:
                for strand in range(1, n + 1):
                    size = 2 * (n - strand) + 1
                    if len(w) + size > lim.max_len:
                        continue
                    for slot in range(len(w) + 1):
                        for kind in ("over", "under"):
                            for kink in self.kinks:
                                if kink != "none" and kink == ("+" if kind == "over" else "-"):
                                    continue  # same block as kink "none"
                                yield None, "l-move", (slot, strand, kind, kink)
            if n >= 2:
                sysn = self.system(n)
                for strand in range(1, n):
                    for kind in ("over", "under"):
                        for kink in self.kinks:
                            if kink != "none" and kink == ("+" if kind == "over" else "-"):
                                continue
                            block = encode_word(l_move_block(n - 1, strand, kind, kink))
                            for match in sysn.occurrences(w, block) if sysn else ():
                                rest = [w[q] for q in range(len(w)) if q not in match[0]]
                                if any((c >> 3) >= n - 1 for c in rest):
                                    continue
                                lst, at = self.prepare(n, w, ("block",) + match)
                                yield ("block",) + match, "l-destab", (at, strand, kind, kink)
        if self.flavor.has_ties:
            perm = permutation_of(MonoidWord(n, self.flavor, toks))
            for i in range(1, n + 1):
                j = perm(i)
                if j != i and len(w) + 2 * abs(i - j) - 1 <= lim.max_len:
                    yield None, "t-stab", (i, j)
            for q in back:
                if toks[q].kind != "e":
                    continue
                k = toks[q].index
                rest = MonoidWord(n, self.flavor, toks[:q] + toks[q + 1:])
                perm = permutation_of(rest)
                if perm(k) == k + 1:
                    yield ("back", q), "t-destab", (k, k + 1)
                elif perm(k + 1) == k:
                    yield ("back", q), "t-destab", (k + 1, k)

    def realize(self, state, prep, kind, params, record=None):
        """Concrete result ``(n, codes)`` of a move, or ``None`` when it does not apply."""
        n, w = state
        lst, _ = self.prepare(n, w, prep, record)
        word = MonoidWord(n, self.flavor, decode_word(lst))
        try:
            out = apply_move(word, kind, params, self.mode)
        except InputError:
            return None
        return out

    def move_neighbors(self, state):
        out = []
        for prep, kind, params in self.move_candidates(state):
            res = self.realize(state, prep, kind, params)
            if res is None or res.n > self.limits.max_n or len(res) > self.limits.max_len:
                continue
            nb = self.state_of(res)
            if len(nb[1]) <= self.limits.max_len and nb != state:
                out.append((nb, ("move", prep, kind, params)))
        return out

    def rule_neighbors(self, state):
        n, w = state
        sysn = self.system(n)
        if sysn is None:
            return []
        return [((n, nf), ("rule",) + edge) for nf, edge in sysn.neighbors(w, self.limits.max_len)]

    def expand(self, state):
        if self.threads > 1:
            with ThreadPoolExecutor(max_workers=2) as pool:
                a = pool.submit(self.rule_neighbors, state)
                b = pool.submit(self.move_neighbors, state)
                found = a.result() + b.result()
        else:
            found = self.rule_neighbors(state) + self.move_neighbors(state)
        seen = set()
        for nb, edge in found:
            if nb not in seen:
                seen.add(nb)
                yield nb, edge

    def trail(self, start: MonoidWord, parents, meet) -> list[Step]:
        """Replay the search edges from ``start`` to ``meet`` as concrete moves."""
        tr = _Trail(start, self.mode)
        rec: list = []
        self.nf(start.n, tr.codes(), rec)
        tr.relations(rec)
        for parent, edge in search_path(parents, meet):
            n, w = parent
            if (tr.word.n, tr.codes()) != parent:
                raise AssertionError("internal error: trail left the search path")
            rec = []
            if edge[0] == "rule":
                self.system(n).apply_rule(w, edge[1], edge[2], rec)
                tr.relations(rec)
            else:
                _, prep, kind, params = edge
                self.prepare(n, w, prep, rec)
                tr.relations(rec)
                tr.push(kind, params)
            rec = []
            self.nf(tr.word.n, tr.codes(), rec)
            tr.relations(rec)
        if (tr.word.n, tr.codes()) != meet:
            raise AssertionError("internal error: trail does not reach the meeting word")
        return tr.steps


def _invert_steps(start: MonoidWord, steps: list[Step]) -> list[Step]:
    words = [start] + [st.result for st in steps]
    out = []
    for m in range(len(steps), 0, -1):
        kind, params = inverse_move(steps[m - 1].kind, steps[m - 1].params, words[m - 1])
        out.append(Step(kind, params, words[m - 1]))
    return out


# verdicts


@dataclasses.dataclass(frozen=True)
class Equivalent:
    certificate: EquivalenceCertificate
    status = "equivalent"
    exit_code = 0


@dataclasses.dataclass(frozen=True)
class Distinguished:
    first: InvariantFingerprint
    second: InvariantFingerprint
    status = "distinguished"
    exit_code = 1


@dataclasses.dataclass(frozen=True)
class Unknown:
    budget: int
    status = "unknown"
    exit_code = 2


SearchVerdict = Equivalent | Distinguished | Unknown


def fingerprint_word(w: MonoidWord, max_precrossings: int = DEFAULT_MAX_PRECROSSINGS) -> InvariantFingerprint:
    """
    Fingerprint of the closure of ``w`` (TSM words go through mu first).

    >>> print(fingerprint_word(MonoidWord.parse("s1 e1", 2, "TM")))
    components 1
    partition {{1}}
    weight 1 []
    """
    if w.flavor is Flavor.TSM:
        w = map_flavor_mu(w)
    return fingerprint(close_braid(w), max_precrossings)


def equivalent_closures(w1: MonoidWord, w2: MonoidWord, budget: int = DEFAULT_BUDGET,
                        moves: str = "markov", limits: Limits | None = None, mode: str = "theorem",
                        threads: int = 1, max_precrossings: int = DEFAULT_MAX_PRECROSSINGS) -> SearchVerdict:
    """
    Decide closure equivalence as far as ``budget`` allows.

    Different fingerprints prove inequivalence.  Otherwise a bidirectional
    best-first search over normalized words looks for a chain of moves; the
    budget counts distinct words visited on both sides together.

    >>> a, b = MonoidWord.parse("s1", 2, "PM"), MonoidWord.parse("s1 s2", 3, "PM")
    >>> equivalent_closures(a, b).certificate.kinds()
    ['real-stab+']
    """
    if w1.flavor != w2.flavor:
        raise InputError(f"flavors differ: {w1.flavor.value} vs {w2.flavor.value}")
    if mode not in CONJ_MODES:
        raise InputError(f"unknown conjugation mode {mode!r}")
    f1 = fingerprint_word(w1, max_precrossings)
    f2 = fingerprint_word(w2, max_precrossings)
    if f1 != f2:
        return Distinguished(f1, f2)
    if w1 == w2:
        return Equivalent(EquivalenceCertificate(w1, (), mode))
    if limits is None:
        limits = Limits.around(w1, w2)
    searcher = _Searcher(w1.flavor, moves, limits, mode, threads)
    s1, s2 = searcher.state_of(w1), searcher.state_of(w2)
    found = bidirectional_search(s1, s2, searcher.expand, budget, "best", key=lambda st: len(st[1]) + st[0])
    if found is None:
        return Unknown(budget)
    fwd, bwd, meet = found
    steps = searcher.trail(w1, fwd, meet)
    back = searcher.trail(w2, bwd, meet)
    cert = EquivalenceCertificate(w1, tuple(steps + _invert_steps(w2, back)), mode)
    if replay(cert) != w2:
        raise AssertionError("internal error: certificate does not end at the target word")
    return Equivalent(cert)
