"""Exact computations with knot-group representations, sheaves along knots and cord-algebra augmentations."""

from .augment import Augmentation, evaluate, from_kch_rep, from_sheaf, lift, realize, verify
from .diagram import WirtingerPresentation, knot, parse_pd, wirtinger
from .exactalg import GF, QQ, Matrix
from .reps import Representation, check_relations, classify_rep, trefoil_example
from .sheaf import SheafData, classify, is_simple, pushforward, skyscraper
from .variety import census, enumerate_augmentations, universal_locus_check
from .words import GroupWord

__all__ = [
    "Augmentation",
    "GF",
    "GroupWord",
    "Matrix",
    "QQ",
    "Representation",
    "SheafData",
    "WirtingerPresentation",
    "census",
    "check_relations",
    "classify",
    "classify_rep",
    "enumerate_augmentations",
    "evaluate",
    "from_kch_rep",
    "from_sheaf",
    "is_simple",
    "knot",
    "lift",
    "parse_pd",
    "pushforward",
    "realize",
    "skyscraper",
    "trefoil_example",
    "universal_locus_check",
    "verify",
    "wirtinger",
]
__version__ = "0.1.0"
