"""Random word generation shared by the property tests."""

from __future__ import annotations

from tiedbraids import Flavor, MonoidWord, Token


def random_word(rng, flavor, n, length) -> MonoidWord:
    flavor = Flavor(flavor)
    if n < 2:
        return MonoidWord(n, flavor, ())
    kinds = sorted(flavor.kinds)
    return MonoidWord(n, flavor, tuple(Token(rng.choice(kinds), rng.randint(1, n - 1)) for _ in range(length)))


def random_tokens(rng, flavor, n, length) -> tuple[Token, ...]:
    return random_word(rng, flavor, n, length).tokens
