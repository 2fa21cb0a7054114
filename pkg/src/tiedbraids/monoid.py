"""
Words in the braid-like monoids B_n, PM_n, TM_n, TSM_n and TPM_n.

A word is a tuple of generator tokens read top to bottom (left to right).
Tokens are ``Token(kind, index)`` with ``kind`` one of

    's'  sigma_i            'S'  sigma_i^{-1}
    'p'  pre-crossing p_i   't'  singular crossing tau_i
    'e'  tie eta_i

which is also the ASCII spelling used by the word text format (``s1``,
``S2``, ``p1``, ``t3``, ``e1``; ``E1,3`` is a generalized tie that is
expanded on parse).
"""

from __future__ import annotations

import dataclasses
import enum
import re
from typing import Iterable, NamedTuple, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .errors import InputError


class Flavor(str, enum.Enum):
    B = "B"
    PM = "PM"
    TM = "TM"
    TSM = "TSM"
    TPM = "TPM"

    @property
    def kinds(self) -> frozenset[str]:
        return _FLAVOR_KINDS[self]

    @property
    def has_ties(self) -> bool:
        return "e" in self.kinds

    def __str__(self):
        return self.value


_FLAVOR_KINDS = {
    Flavor.B: frozenset("sS"),
    Flavor.PM: frozenset("sSp"),
    Flavor.TM: frozenset("sSe"),
    Flavor.TSM: frozenset("sSte"),
    Flavor.TPM: frozenset("sSpe"),
}

# flavor left after deleting every tie token
_TIE_FREE = {
    Flavor.B: Flavor.B,
    Flavor.PM: Flavor.PM,
    Flavor.TM: Flavor.B,
    Flavor.TSM: Flavor.TSM,
    Flavor.TPM: Flavor.PM,
}

_GREEK = {"s": "σ", "S": "σ", "p": "p", "t": "τ", "e": "η"}


class Token(NamedTuple):
    kind: str
    index: int

    @property
    def invertible(self) -> bool:
        return self.kind in "sS"

    def inverse(self) -> Token:
        if self.kind == "s":
            return Token("S", self.index)
        if self.kind == "S":
            return Token("s", self.index)
        raise InputError(f"{self} has no inverse")

    @property
    def is_transposition(self) -> bool:
        return self.kind != "e"

    def ascii(self) -> str:
        return f"{self.kind}{self.index}"

    def __str__(self):
        suffix = "⁻¹" if self.kind == "S" else ""
        return f"{_GREEK[self.kind]}{self.index}{suffix}"


def s(i):
    return Token("s", i)


def S(i):
    return Token("S", i)


def p(i):
    return Token("p", i)


def t(i):
    return Token("t", i)


def e(i):
    return Token("e", i)


_ASCII_RE = re.compile(r"^([sSpte])(\d+)$")
_GREEK_RE = re.compile(r"^([σpτη])(\d+)(⁻¹|\^-1)?$")
_GEN_TIE_RE = re.compile(r"^(?:E|η)\(?(\d+),(\d+)\)?$")


def parse_token(text: str) -> Token:
    """
    Parse one token in ASCII (``S2``) or display (``σ2⁻¹``) spelling.

    >>> parse_token("S2"), parse_token("σ2⁻¹")
    (Token(kind='S', index=2), Token(kind='S', index=2))
    """
    m = _ASCII_RE.match(text)
    if m:
        return Token(m.group(1), int(m.group(2)))
    m = _GREEK_RE.match(text)
    if m:
        letter, idx, inv = m.groups()
        kind = {"σ": "s", "p": "p", "τ": "t", "η": "e"}[letter]
        if inv:
            if kind != "s":
                raise InputError(f"only sigma tokens have inverses: {text!r}")
            kind = "S"
        return Token(kind, int(idx))
    raise InputError(f"unrecognized token {text!r}")


@dataclasses.dataclass(frozen=True)
class MonoidWord:
    """A word over ``n`` strands in the monoid named by ``flavor``."""

    n: int
    flavor: Flavor
    tokens: tuple[Token, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        object.__setattr__(self, "tokens", tuple(Token(*tok) for tok in self.tokens))
        if self.n < 1:
            raise InputError(f"strand count must be >= 1, got {self.n}")
        allowed = self.flavor.kinds
        for tok in self.tokens:
            if tok.kind not in allowed:
                raise InputError(f"token {tok} not allowed in {self.flavor.value}")
            if not 1 <= tok.index <= self.n - 1:
                raise InputError(f"token {tok} out of range for n={self.n}")

    @classmethod
    def parse(cls, text: str, n: int, flavor: Flavor | str) -> MonoidWord:
        """Build a word from whitespace-separated tokens (either spelling)."""
        tokens: list[Token] = []
        for item in text.split():
            m = _GEN_TIE_RE.match(item)
            if m:
                tie = expand_generalized_tie(int(m.group(1)), int(m.group(2)), n)
                tokens.extend(tie.tokens)
            else:
                tokens.append(parse_token(item))
        return cls(n, Flavor(flavor), tuple(tokens))

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __add__(self, other: MonoidWord) -> MonoidWord:
        if (self.n, self.flavor) != (other.n, other.flavor):
            raise InputError("cannot concatenate words of different n or flavor")
        return self.with_tokens(self.tokens + other.tokens)

    def with_tokens(self, tokens: Iterable[Token], n: int | None = None) -> MonoidWord:
        return MonoidWord(self.n if n is None else n, self.flavor, tuple(tokens))

    def as_flavor(self, flavor: Flavor | str) -> MonoidWord:
        return MonoidWord(self.n, Flavor(flavor), self.tokens)

    def ascii(self) -> str:
        return " ".join(tok.ascii() for tok in self.tokens)

    def serialize(self) -> str:
        """Word file text: a header line, then the tokens in ASCII spelling."""
        return f"n={self.n} flavor={self.flavor.value}\n{self.ascii()}\n"

    @classmethod
    def from_text(cls, text: str) -> MonoidWord:
        """
        Parse word file text (``#`` starts a comment).

        >>> MonoidWord.from_text("n=3 flavor=TM\\nE1,3").ascii()
        's1 e2 S1'
        """
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise InputError("empty word file")
        m = _HEADER_RE.match(lines[0])
        if not m:
            raise InputError(f"bad header {lines[0]!r}; expected 'n=<int> flavor=<B|PM|TM|TSM|TPM>'")
        try:
            flavor = Flavor(m.group(2))
        except ValueError:
            raise InputError(f"unknown flavor {m.group(2)!r}") from None
        return cls.parse(" ".join(lines[1:]), int(m.group(1)), flavor)

    def __str__(self):
        return " ".join(str(tok) for tok in self.tokens) or "1"


_HEADER_RE = re.compile(r"^n=(\d+)\s+flavor=(\S+)$")


@dataclasses.dataclass(frozen=True)
class Permutation:
    """``image[i-1]`` is the bottom position reached by the strand entering at top position ``i``."""

    image: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(1, n + 1)))

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.image, 1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = []
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return out

    def __str__(self):
        return " ".join(f"{i}->{v}" for i, v in enumerate(self.image, 1))


def _positions_perm(tokens: Sequence[Token], n: int) -> Permutation:
    # strand_at[k] = top position of the strand currently at position k+1
    strand_at = list(range(1, n + 1))
    for tok in tokens:
        if tok.kind != "e":
            i = tok.index
            strand_at[i - 1], strand_at[i] = strand_at[i], strand_at[i - 1]
    image = [0] * n
    for pos, strand in enumerate(strand_at, 1):
        image[strand - 1] = pos
    return Permutation(tuple(image))


def permutation_of(w: MonoidWord) -> Permutation:
    """
    Permutation of strand positions induced by ``w`` after forgetting ties.

    Every non-tie token at index i swaps positions i and i+1.

    >>> str(permutation_of(MonoidWord.parse("p1 s2", 3, "PM")))
    '1->3 2->1 3->2'
    """
    return _positions_perm(w.tokens, w.n)


@dataclasses.dataclass(frozen=True)
class StrandPartition:
    """A set partition of ``{1..n}`` stored with blocks sorted by minimum element."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks if b))
        flat = [x for b in blocks for x in b]
        if len(flat) != len(set(flat)) or sorted(flat) != list(range(1, len(flat) + 1)):
            raise InputError(f"blocks do not partition 1..n: {self.blocks}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def discrete(cls, n: int) -> StrandPartition:
        return cls(tuple((i,) for i in range(1, n + 1)))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> StrandPartition:
        ds = DisjointSet(range(1, n + 1))
        for a, b in pairs:
            ds.merge(a, b)
        return cls(tuple(tuple(sorted(sub)) for sub in ds.subsets()))

    @property
    def n(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block_of(self, x: int) -> tuple[int, ...]:
        for b in self.blocks:
            if x in b:
                return b
        raise KeyError(x)

    def shape(self) -> tuple[int, ...]:
        return tuple(sorted((len(b) for b in self.blocks), reverse=True))

    def canonical_shape(self) -> StrandPartition:
        """Relabel so the partition depends only on its block sizes (largest blocks first)."""
        blocks, start = [], 1
        for size in self.shape():
            blocks.append(tuple(range(start, start + size)))
            start += size
        return StrandPartition(tuple(blocks))

    def refines(self, other: StrandPartition) -> bool:
        return all(any(set(b) <= set(o) for o in other.blocks) for b in self.blocks)

    def __str__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def expand_generalized_tie(i: int, j: int, n: int, flavor: Flavor | str = Flavor.TM) -> MonoidWord:
    """
    The word of the generalized tie joining strands ``i < j``:
    sigma_i ... sigma_{j-2} eta_{j-1} sigma_{j-2}^{-1} ... sigma_i^{-1}.

    >>> str(expand_generalized_tie(1, 3, 3))
    'σ1 η2 σ1⁻¹'
    """
    if not (1 <= i <= j <= n):
        raise InputError(f"generalized tie ({i},{j}) needs 1 <= i <= j <= n={n}")
    if i == j:
        return MonoidWord(n, flavor, ())
    up = [s(k) for k in range(i, j - 1)]
    down = [S(k) for k in range(j - 2, i - 1, -1)]
    return MonoidWord(n, flavor, tuple(up) + (e(j - 1),) + tuple(down))


@dataclasses.dataclass(frozen=True)
class Relation:
    lhs: MonoidWord
    rhs: MonoidWord
    name: str

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


def _tie_relations(n, x):
    """Relations linking ties to the crossing-type generator ``x`` ('p' or 't')."""
    X = lambda i: Token(x, i)  # noqa: E731
    rels = []
    for i in range(1, n):
        rels.append(((X(i), e(i)), (e(i), X(i)), "cross-tie-commute"))
    for i in range(1, n):
        for j in range(1, n):
            if abs(i - j) >= 2:
                rels.append(((X(i), e(j)), (e(j), X(i)), "cross-tie-far"))
    for i in range(1, n):
        for j in (i - 1, i + 1):
            if not 1 <= j <= n - 1:
                continue
            rels.append(((e(i), X(j), X(i)), (X(j), X(i), e(j)), "tie-slide-cross-cross"))
            rels.append(((e(i), e(j), X(i)), (e(j), X(i), e(j)), "tie-pair-cross"))
            rels.append(((e(j), X(i), e(j)), (X(i), e(i), e(j)), "tie-pair-cross"))
            rels.append(((e(i), X(j), s(i)), (X(j), s(i), e(j)), "tie-slide-cross-sigma"))
            rels.append(((e(i), s(j), X(i)), (s(j), X(i), e(j)), "tie-slide-sigma-cross"))
            rels.append(((X(i), e(j)), (s(i), e(j), S(i), X(i)), "cross-tie-conjugate"))
    return rels


def _relation_tuples(flavor: Flavor, n: int):
    kinds = flavor.kinds
    rels = []
    for i in range(1, n):
        rels.append(((s(i), S(i)), (), "inverse"))
        rels.append(((S(i), s(i)), (), "inverse"))
    for i in range(1, n):
        for j in range(i + 2, n):
            rels.append(((s(i), s(j)), (s(j), s(i)), "braid-far"))
    for i in range(1, n - 1):
        rels.append(((s(i), s(i + 1), s(i)), (s(i + 1), s(i), s(i + 1)), "braid"))
    for x in "pt":
        if x not in kinds:
            continue
        X = lambda i: Token(x, i)  # noqa: E731
        for i in range(1, n):
            for j in range(i + 2, n):
                rels.append(((X(i), X(j)), (X(j), X(i)), "cross-far"))
        for i in range(1, n):
            for j in range(1, n):
                if abs(i - j) >= 2:
                    rels.append(((X(i), s(j)), (s(j), X(i)), "cross-sigma-far"))
                    rels.append(((X(i), S(j)), (S(j), X(i)), "cross-sigma-far"))
        for i in range(1, n):
            rels.append(((X(i), s(i)), (s(i), X(i)), "cross-sigma-commute"))
            rels.append(((X(i), S(i)), (S(i), X(i)), "cross-sigma-commute"))
        for i in range(1, n - 1):
            rels.append(((s(i), s(i + 1), X(i)), (X(i + 1), s(i), s(i + 1)), "cross-braid"))
            rels.append(((s(i + 1), s(i), X(i + 1)), (X(i), s(i + 1), s(i)), "cross-braid"))
    if "e" in kinds:
        for i in range(1, n):
            for j in range(i + 1, n):
                rels.append(((e(i), e(j)), (e(j), e(i)), "tie-commute"))
        for i in range(1, n):
            rels.append(((e(i), s(i)), (s(i), e(i)), "tie-sigma-commute"))
        for i in range(1, n):
            for j in range(1, n):
                if abs(i - j) > 1:
                    rels.append(((e(i), s(j)), (s(j), e(i)), "tie-sigma-far"))
        for i in range(1, n):
            for j in (i - 1, i + 1):
                if not 1 <= j <= n - 1:
                    continue
                for sig in (s(i), S(i)):
                    rels.append(((e(i), s(j), sig), (s(j), sig, e(j)), "tie-slide"))
        for i in range(1, n):
            for j in (i - 1, i + 1):
                if not 1 <= j <= n - 1:
                    continue
                rels.append(((e(i), e(j), s(i)), (e(j), s(i), e(j)), "tie-pair-sigma"))
                rels.append(((e(j), s(i), e(j)), (s(i), e(i), e(j)), "tie-pair-sigma"))
        for i in range(1, n):
            rels.append(((e(i), e(i)), (e(i),), "tie-idempotent"))
        for x in "pt":
            if x in kinds:
                rels.extend(_tie_relations(n, x))
    return rels


def relations_of(flavor: Flavor | str, n: int) -> list[Relation]:
    """
    Every instance over legal indices of the defining relations of ``flavor`` on
    ``n`` strands, plus the two inverse relations per sigma generator.
    """
    flavor = Flavor(flavor)
    if n < 2:
        raise InputError(f"no generators for n={n}; relations need n >= 2")
    out = []
    for lhs, rhs, name in _relation_tuples(flavor, n):
        out.append(Relation(MonoidWord(n, flavor, lhs), MonoidWord(n, flavor, rhs), name))
    return out


def _replace_all(tokens, old, new):
    k = len(old)
    if k == 0:
        for pos in range(len(tokens) + 1):
            yield pos, tokens[:pos] + new + tokens[pos:]
        return
    for pos in range(len(tokens) - k + 1):
        if tokens[pos:pos + k] == old:
            yield pos, tokens[:pos] + new + tokens[pos + k:]


def rewrite_neighbors(w: MonoidWord) -> set[MonoidWord]:
    """All words one relation application (in either direction) away from ``w``."""
    if w.n < 2:
        return set()
    out = set()
    for rel in relations_of(w.flavor, w.n):
        for old, new in ((rel.lhs.tokens, rel.rhs.tokens), (rel.rhs.tokens, rel.lhs.tokens)):
            for _, toks in _replace_all(w.tokens, old, new):
                out.add(w.with_tokens(toks))
    out.discard(w)
    return out


def map_flavor_mu(w: MonoidWord) -> MonoidWord:
    """Send a TSM word to TPM by replacing every singular crossing tau_i with p_i."""
    if w.flavor is not Flavor.TSM:
        raise InputError(f"mu is defined on TSM words, got {w.flavor.value}")
    toks = tuple(Token("p", tok.index) if tok.kind == "t" else tok for tok in w.tokens)
    return MonoidWord(w.n, Flavor.TPM, toks)


def tie_pairs(tokens: Sequence[Token], n: int) -> list[tuple[int, int]]:
    """Bottom-anchored endpoint pairs of every tie token, in word order."""
    pairs = []
    # walk from the bottom, keeping the permutation of the suffix below the current token
    strand_at = list(range(1, n + 1))  # position -> bottom position reached from here
    for tok in reversed(tokens):
        i = tok.index
        if tok.kind == "e":
            pairs.append((strand_at[i - 1], strand_at[i]))
        else:
            strand_at[i - 1], strand_at[i] = strand_at[i], strand_at[i - 1]
    pairs.reverse()
    return pairs


def normalize_ties(w: MonoidWord) -> tuple[MonoidWord, StrandPartition]:
    """
    Split ``w`` into its tie-free part and the partition of bottom positions
    generated by sliding every tie to the bottom.

    >>> pure, part = normalize_ties(MonoidWord.parse("e1 s1", 2, "TM"))
    >>> str(pure), str(part)
    ('σ1', '{{1,2}}')
    """
    if not w.flavor.has_ties:
        return w, StrandPartition.discrete(w.n)
    pure = MonoidWord(w.n, _TIE_FREE[w.flavor], tuple(tok for tok in w.tokens if tok.kind != "e"))
    return pure, StrandPartition.from_pairs(w.n, tie_pairs(w.tokens, w.n))
