"""Style-matrix text style transfer."""

from ._nst import (
    DataError,
    Model,
    NumericError,
    StyleMatrix,
    UsageError,
    aggregate,
    bleu,
    classical_mds,
    neutralize,
    style_matrix,
    stylize,
    symmetric_eigen,
    toygen,
    train,
)

__all__ = [
    "DataError",
    "Model",
    "NumericError",
    "StyleMatrix",
    "UsageError",
    "aggregate",
    "bleu",
    "classical_mds",
    "neutralize",
    "style_matrix",
    "stylize",
    "symmetric_eigen",
    "toygen",
    "train",
]
