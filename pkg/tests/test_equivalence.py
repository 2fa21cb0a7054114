import dataclasses

import pytest

from corpus import pairs
from helpers import random_word
from tiedbraids import (
    Distinguished,
    EquivalenceCertificate,
    Equivalent,
    InputError,
    Limits,
    MonoidWord,
    Move,
    Unknown,
    apply_move,
    equivalent_closures,
    fingerprint_word,
    map_certificate_mu,
    map_flavor_mu,
    markov_neighbors,
    permutation_of,
)
from tiedbraids.equivalence import inverse_move, replay

W = MonoidWord.parse


# neighbors


def test_neighbor_examples():
    assert (Move("t-stab", (1, 2)), W("s1 e1", 2, "TM")) in markov_neighbors(W("s1", 2, "TM"))
    assert (Move("pseudo-stab"), W("s1 p2", 3, "PM")) in markov_neighbors(W("s1", 2, "PM"))
    nbs = markov_neighbors(W("p1 s1", 2, "TPM"))
    assert (Move("commuting", ("head-to-tail", "p1")), W("s1 p1", 2, "TPM")) in nbs
    assert str(Move("t-stab", (1, 2))) == "t-stab(1,2)"


def test_flavor_gates_moves():
    kinds = {m.kind for m, _ in markov_neighbors(W("s1", 2, "B"))}
    assert "pseudo-stab" not in kinds and "t-stab" not in kinds
    kinds = {m.kind for m, _ in markov_neighbors(W("t1", 2, "TSM"))}
    assert "singular-commuting" in kinds and "pseudo-stab" not in kinds
    with pytest.raises(InputError):
        apply_move(W("s1", 2, "TM"), "pseudo-stab")
    with pytest.raises(InputError):
        apply_move(W("s1", 2, "PM"), "t-stab", (1, 2))


def test_limits_prune():
    w = W("s1", 2, "B")
    nbs = markov_neighbors(w, Limits(2, 3))
    assert all(nb.n <= 2 and len(nb) <= 3 for _, nb in nbs)
    assert not any(m.kind == "real-stab+" for m, _ in nbs)


def test_conjugation_modes():
    # a leading tie may be cycled in the tied monoid but not in TPM unless asked
    w = W("e1 s1", 2, "TPM")
    with pytest.raises(InputError):
        apply_move(w, "conjugation", ("head-to-tail", "e1"))
    assert apply_move(w, "conjugation", ("head-to-tail", "e1"), "full") == W("s1 e1", 2, "TPM")
    assert apply_move(W("e1 s1", 2, "TM"), "conjugation", ("head-to-tail", "e1")) == W("s1 e1", 2, "TM")


def test_destabilization_needs_a_private_last_strand():
    assert apply_move(W("s1 s2", 3, "B"), "real-destab", ("s2",)) == W("s1", 2, "B")
    with pytest.raises(InputError):
        apply_move(W("s2 s1 s2", 3, "B"), "real-destab", ("s2",))
    with pytest.raises(InputError):
        apply_move(W("s1 s2", 3, "B"), "real-destab", ("S2",))


def test_move_soundness(rng):
    cases = 0
    while cases < 500:
        f = rng.choice(["B", "PM", "TM", "TSM", "TPM"])
        w = random_word(rng, f, rng.randint(1, 4), rng.randint(0, 6))
        fp = fingerprint_word(w)
        for move, nb in markov_neighbors(w):
            assert fingerprint_word(nb) == fp, (w, move, nb)
        cases += 1


def test_t_stab_gate(rng):
    for _ in range(300):
        f = rng.choice(["TM", "TSM", "TPM"])
        w = random_word(rng, f, rng.randint(2, 4), rng.randint(0, 6))
        perm = permutation_of(w)
        for move, _ in markov_neighbors(w):
            if move.kind == "t-stab":
                i, j = move.params
                assert perm(i) == j


def test_t_stab_rejects_wrong_pair():
    with pytest.raises(InputError):
        apply_move(W("s1", 3, "TM"), "t-stab", (1, 3))
    assert apply_move(W("s1 s2", 3, "TM"), "t-stab", (1, 3)) == W("s1 s2 s1 e2 S1", 3, "TM")


def test_moves_invert(rng):
    for _ in range(200):
        f = rng.choice(["B", "PM", "TM", "TSM", "TPM"])
        w = random_word(rng, f, rng.randint(1, 4), rng.randint(0, 6))
        for move, nb in markov_neighbors(w):
            if move.kind == "relation-rewrite":
                continue
            kind, params = inverse_move(move.kind, move.params, w)
            assert apply_move(nb, kind, params) == w, (w, move)


# search


def test_closure_examples():
    v = equivalent_closures(W("s1", 2, "PM"), W("s1 s2", 3, "PM"))
    assert isinstance(v, Equivalent) and v.certificate.kinds() == ["real-stab+"]
    v = equivalent_closures(W("e1", 2, "TM"), W("", 2, "TM"))
    assert isinstance(v, Distinguished) and v.exit_code == 1
    assert v.first.partition != v.second.partition
    w = W("s1 p1 e1", 2, "TPM")
    v = equivalent_closures(w, w)
    assert isinstance(v, Equivalent) and len(v.certificate) == 0


def test_flavor_mismatch():
    with pytest.raises(InputError):
        equivalent_closures(W("s1", 2, "B"), W("s1", 2, "PM"))


def test_unknown_on_tiny_budget():
    v = equivalent_closures(W("s1 s1 s1", 2, "B"), W("s1 s2 s1 s2", 3, "B"), budget=2)
    assert isinstance(v, Unknown) and v.exit_code == 2


def test_certificate_replays_byte_for_byte():
    a, b = W("s1 s2 e1", 3, "TM"), W("s1 s2 e2", 3, "TM")
    cert = equivalent_closures(a, b).certificate
    assert replay(cert).serialize() == b.serialize()
    assert cert.serialize().splitlines()[-1].endswith("-> n=3 s1 s2 e2")


def test_replay_rejects_tampering():
    cert = equivalent_closures(W("s1 s1 s1", 2, "B"), W("s1 s2 s1 s2", 3, "B")).certificate
    bad = dataclasses.replace(cert.steps[0], result=W("s1", 2, "B"))
    with pytest.raises(AssertionError):
        replay(dataclasses.replace(cert, steps=(bad,) + cert.steps[1:]))


def test_threads_do_not_change_the_verdict():
    a, b = W("s1 s1 s1", 2, "B"), W("s1 s2 s1 s2", 3, "B")
    one = equivalent_closures(a, b, threads=1).certificate
    two = equivalent_closures(a, b, threads=2).certificate
    assert one == two


def test_mu_naturality():
    tsm = [(a, b) for a, b in pairs() if a.flavor.value == "TSM"]
    tsm.append((W("t1 s1", 2, "TSM"), W("s1 t1", 2, "TSM")))
    for a, b in tsm:
        v = equivalent_closures(a, b, budget=100_000)
        assert isinstance(v, Equivalent)
        image = map_certificate_mu(v.certificate)
        assert image.start == map_flavor_mu(a)
        assert "singular-commuting" not in image.kinds()
        assert replay(image) == map_flavor_mu(b)
        assert isinstance(equivalent_closures(map_flavor_mu(a), map_flavor_mu(b), budget=100_000), Equivalent)


@pytest.mark.parametrize("index", range(len(pairs())))
def test_corpus_pair(index):
    a, b = pairs()[index]
    for moves in ("markov", "lmove"):
        v = equivalent_closures(a, b, budget=100_000, moves=moves)
        assert isinstance(v, Equivalent), (moves, a, b)
        assert replay(v.certificate) == b


def test_lmove_certificates_use_lmove_moves():
    v = equivalent_closures(W("s1", 2, "B"), W("s1 s2", 3, "B"), moves="lmove")
    assert set(v.certificate.kinds()) <= {"relation-rewrite", "l-move", "l-destab", "commuting",
                                          "singular-commuting", "t-stab", "t-destab"}


def test_certificate_type():
    cert = EquivalenceCertificate(W("s1", 2, "B"))
    assert cert.end == cert.start and len(cert) == 0 and cert.serialize() == ""
