from fractions import Fraction

import pytest

from helpers import random_word
from oracles import as_oracle, brute_force_fingerprint
from tiedbraids import (
    DiagramError,
    InputError,
    MonoidWord,
    MorseDiagram,
    ResolutionLimitError,
    StrandPartition,
    close_braid,
    components,
    enumerate_resolutions,
    fingerprint,
    linking_vector,
    permutation_of,
    validate,
)
from tiedbraids.diagram import (
    Cap,
    Cup,
    PreCross,
    Tie,
    fingerprint_by_enumeration,
    insert_kink,
    insert_r2,
    insert_rows,
)

W = MonoidWord.parse
UNKNOT = MorseDiagram((Cup(1), Cap(1)))


def test_validate_examples():
    validate(UNKNOT)
    with pytest.raises(DiagramError) as err:
        validate(MorseDiagram((Cap(1),)))
    assert err.value.row == 1
    with pytest.raises(DiagramError):
        validate(MorseDiagram((Cup(1), Tie(1, 1), Cap(1))))
    with pytest.raises(DiagramError):
        validate(MorseDiagram((Cup(1),)))
    validate(MorseDiagram((), boundary=2))


def test_closures_validate(rng):
    for _ in range(100):
        f = rng.choice(["B", "PM", "TM", "TPM"])
        validate(close_braid(random_word(rng, f, rng.randint(1, 5), rng.randint(0, 8))))


def test_closure_rejects_tsm():
    with pytest.raises(InputError):
        close_braid(W("t1", 2, "TSM"))


def test_serialize_round_trip(rng):
    for _ in range(50):
        d = close_braid(random_word(rng, "TPM", rng.randint(1, 4), rng.randint(0, 8)))
        assert MorseDiagram.parse(d.serialize()) == d
    braid = MorseDiagram((PreCross(1), Tie(1, 3)), boundary=3)
    assert MorseDiagram.parse(braid.serialize()) == braid
    with pytest.raises(InputError):
        MorseDiagram.parse("morse open\ncup 1\n")
    with pytest.raises(InputError):
        MorseDiagram.parse("morse closed\nwiggle 1\n")


def test_component_examples():
    cmap, part = components(UNKNOT)
    assert cmap.count == 1 and part == StrandPartition(((1,),))
    assert components(close_braid(W("s1 s1", 2, "B")))[0].count == 2
    cmap, part = components(close_braid(W("e1 s1", 2, "TM")))
    assert cmap.count == 1 and part == StrandPartition(((1,),))
    cmap, part = components(close_braid(W("e1", 2, "TM")))
    assert cmap.count == 2 and part == StrandPartition(((1, 2),))


def test_closure_examples():
    assert components(close_braid(W("", 1, "B")))[0].count == 1
    d = close_braid(W("p1", 2, "PM"))
    assert components(d)[0].count == 1 and len(d.precrossing_rows()) == 1


def test_component_count_is_cycle_count(rng):
    for _ in range(100):
        w = random_word(rng, "TPM", rng.randint(1, 5), rng.randint(0, 8))
        assert components(close_braid(w))[0].count == len(permutation_of(w).cycles())


def test_resolution_examples():
    d = close_braid(W("s1 s1", 2, "B"))
    assert [r for _, r in enumerate_resolutions(d)] == [d]
    res = list(enumerate_resolutions(close_braid(W("p1", 2, "PM"))))
    assert [r for _, r in res] == [close_braid(W("s1", 2, "B")), close_braid(W("S1", 2, "B"))]
    res = list(enumerate_resolutions(close_braid(W("p1 p1", 2, "PM"))))
    assert len(res) == 4
    for _, r in res:
        validate(r)
        assert not r.precrossing_rows()


def test_resolution_cap():
    d = close_braid(W("p1 " * 5, 2, "PM"))
    with pytest.raises(ResolutionLimitError):
        list(enumerate_resolutions(d, max_precrossings=4))
    with pytest.raises(ResolutionLimitError):
        fingerprint(d, max_precrossings=4)


def test_linking_examples():
    assert linking_vector(close_braid(W("s1 s1", 2, "B"))) == (2,)
    assert linking_vector(UNKNOT) == ()
    assert linking_vector(close_braid(W("S1 S1", 2, "B"))) == (-2,)
    with pytest.raises(InputError):
        linking_vector(close_braid(W("p1", 2, "PM")))


def test_fingerprint_examples():
    fp = fingerprint(close_braid(W("p1 p1", 2, "PM")))
    assert fp.components == 2
    assert dict(fp.weights) == {(2,): Fraction(1, 4), (0,): Fraction(1, 2), (-2,): Fraction(1, 4)}
    fp = fingerprint(UNKNOT)
    assert (fp.components, dict(fp.weights)) == (1, {(): 1})
    fp = fingerprint(close_braid(W("e1", 2, "TM")))
    assert fp.components == 2 and fp.partition == StrandPartition(((1, 2),))
    assert dict(fp.weights) == {(0,): 1}


def test_fingerprint_text():
    text = str(fingerprint(close_braid(W("p1 p1", 2, "PM"))))
    assert text.splitlines() == [
        "components 2", "partition {{1},{2}}",
        "weight 1/4 [-2/2]", "weight 1/2 [0/2]", "weight 1/4 [+2/2]"]


def test_fingerprint_matches_oracle(rng):
    for _ in range(300):
        f = rng.choice(["B", "PM", "TM", "TPM"])
        n = rng.randint(1, 5)
        w = random_word(rng, f, n, rng.randint(0, 8))
        assert as_oracle(fingerprint(close_braid(w))) == brute_force_fingerprint(w.tokens, n)


def test_convolution_equals_enumeration(rng):
    for _ in range(100):
        d = close_braid(random_word(rng, "TPM", rng.randint(1, 4), rng.randint(0, 7)))
        assert fingerprint(d) == fingerprint_by_enumeration(d)


def _random_local_moves(rng, d, moves):
    for _ in range(moves):
        widths = d.widths()
        r = rng.randrange(len(d.rows) + 1)
        if widths[r] == 0:
            continue
        roll = rng.random()
        if roll < 0.4:
            d = insert_kink(d, r, rng.randint(1, widths[r]), rng.choice(["x+", "x-", "p"]))
        elif widths[r] >= 2:
            d = insert_r2(d, r, rng.randint(1, widths[r] - 1))
    return d


def test_fingerprint_invariant_under_local_moves(rng):
    for _ in range(200):
        w = random_word(rng, "TPM", rng.randint(1, 4), rng.randint(0, 6))
        d = close_braid(w)
        d2 = _random_local_moves(rng, d, rng.randint(1, 6))
        validate(d2)
        assert fingerprint(d2) == fingerprint(d)


def test_tie_transparency(rng):
    # a tie between two strands of the same two components gives the same partition wherever it sits
    d = close_braid(W("s1 s1 s2 s2", 3, "B"))
    rows = [r for r in range(len(d.rows) + 1) if d.widths()[r] >= 3]
    parts = set()
    for r in rows:
        cmap, _ = components(d)
        for i in range(1, 4):
            for j in range(i + 1, 4):
                d2 = insert_rows(d, r, (Tie(i, j),))
                cm, part = components(d2)
                level = r + 1
                a, b = cm.comp[(level, i)], cm.comp[(level, j)]
                parts.add((frozenset((a, b)), part))
    by_pair = {}
    for pair, part in parts:
        by_pair.setdefault(pair, set()).add(part)
    assert all(len(v) == 1 for v in by_pair.values())
