"""Tied, pseudo and singular braid monoids, their closures and closure equivalence."""

from .errors import DiagramError, InputError, ResolutionLimitError
from .monoid import (
    Flavor,
    MonoidWord,
    Permutation,
    Relation,
    StrandPartition,
    Token,
    expand_generalized_tie,
    map_flavor_mu,
    normalize_ties,
    permutation_of,
    relations_of,
    rewrite_neighbors,
)
from .rewriting import RewritePath, words_equal_in_monoid
from .diagram import (
    InvariantFingerprint,
    MorseDiagram,
    MorseEvent,
    Resolution,
    close_braid,
    components,
    enumerate_resolutions,
    fingerprint,
    linking_vector,
    validate,
)
from .braiding import LMoveSpec, apply_l_move, braid_diagram, orient_precrossings_down
from .equivalence import (
    Distinguished,
    EquivalenceCertificate,
    Equivalent,
    Limits,
    Move,
    Unknown,
    apply_move,
    equivalent_closures,
    fingerprint_word,
    map_certificate_mu,
    markov_neighbors,
)

__all__ = [
    "DiagramError",
    "Distinguished",
    "EquivalenceCertificate",
    "Equivalent",
    "Flavor",
    "InputError",
    "InvariantFingerprint",
    "LMoveSpec",
    "Limits",
    "MonoidWord",
    "MorseDiagram",
    "MorseEvent",
    "Move",
    "Permutation",
    "Relation",
    "Resolution",
    "ResolutionLimitError",
    "RewritePath",
    "StrandPartition",
    "Token",
    "Unknown",
    "apply_l_move",
    "apply_move",
    "braid_diagram",
    "close_braid",
    "components",
    "enumerate_resolutions",
    "equivalent_closures",
    "expand_generalized_tie",
    "fingerprint",
    "fingerprint_word",
    "linking_vector",
    "map_certificate_mu",
    "map_flavor_mu",
    "markov_neighbors",
    "normalize_ties",
    "orient_precrossings_down",
    "permutation_of",
    "relations_of",
    "rewrite_neighbors",
    "validate",
    "words_equal_in_monoid",
]
