"""Exact inference on discrete graphical models by tensor network contraction."""

from ._tinfer import (
    InferenceError,
    Model,
    load_model,
    marginals,
    mmap,
    mpe,
    pr,
    sample,
    stats,
)

__all__ = [
    "InferenceError",
    "Model",
    "load_model",
    "marginals",
    "mmap",
    "mpe",
    "pr",
    "sample",
    "stats",
]
