"""Moral-vignette classification benchmark: Python bindings to the C++ core."""

from moralvig._core import (
    MoralvigError,
    __version__,
    affinities,
    cross_validate,
    evaluate,
    fit,
    kl_divergence,
    predict,
    project,
    stratified_kfold,
    summarize,
    tsne,
)

__all__ = [
    "MoralvigError",
    "__version__",
    "affinities",
    "cross_validate",
    "evaluate",
    "fit",
    "kl_divergence",
    "predict",
    "project",
    "stratified_kfold",
    "summarize",
    "tsne",
]
