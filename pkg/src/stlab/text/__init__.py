"""Text pipeline: normalization recipes and subword segmentation."""

from .normalize import (
    NormalizerRecipe,
    PUNCT_CHARS,
    PUNCT_MAP,
    RECIPES,
    get_recipe,
    normalize,
)
from .subword import (
    BOS_ID,
    EOS_ID,
    PAD_ID,
    RESERVED,
    SubwordError,
    SubwordModel,
    UNK_ID,
    train_subword,
)

__all__ = [
    "NormalizerRecipe",
    "PUNCT_CHARS",
    "PUNCT_MAP",
    "RECIPES",
    "get_recipe",
    "normalize",
    "BOS_ID",
    "EOS_ID",
    "PAD_ID",
    "RESERVED",
    "SubwordError",
    "SubwordModel",
    "UNK_ID",
    "train_subword",
]
