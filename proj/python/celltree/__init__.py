"""Cellular tree classifiers built on median splits.

Trees are grown either by the randomized rule (stop with probability phi(N))
or by the bounded-lookahead rule. Both only ever look at the data inside a
cell, so a build gives the same tree for any number of worker threads.
"""

from ._celltree import (
    AdmissibilityError,
    SchemaError,
    Tree,
    UnknownDistribution,
    __version__,
    bayes_risk,
    build_lookahead,
    build_randomized,
    cli,
    k_plus,
    leaf_bounds,
    lookahead_error,
    phi,
    risk,
    risk_curve,
    sample,
)

__all__ = [
    "AdmissibilityError",
    "SchemaError",
    "Tree",
    "UnknownDistribution",
    "__version__",
    "bayes_risk",
    "build_lookahead",
    "build_randomized",
    "cli",
    "k_plus",
    "leaf_bounds",
    "lookahead_error",
    "phi",
    "risk",
    "risk_curve",
    "sample",
]
