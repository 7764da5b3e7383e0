"""Language-side text normalization recipes.

Each recipe is an ordered list of steps from {lowercase,
punctuation-normalize, punctuation-strip, tokenize} and is idempotent as a
whole. The punctuation mapping table is mirrored in docs/normalization.md;
tests enumerate it from there.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

# Unicode -> ASCII punctuation mapping (the rule table).
PUNCT_MAP = {
    "«": '"', "»": '"',          # guillemets
    "“": '"', "”": '"', "„": '"',  # curly double quotes
    "‘": "'", "’": "'", "‚": "'",  # curly single quotes
    "–": "-", "—": "-", "−": "-",  # en/em dash, minus
    "…": "...",                        # ellipsis
    " ": " ",                          # no-break space
}

# Characters treated as punctuation by tokenize / punctuation-strip.
PUNCT_CHARS = set("!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~") | {
    c for c in PUNCT_MAP if PUNCT_MAP[c].strip() and not PUNCT_MAP[c].isalnum()
}

_WS = re.compile(r"\s+")


def _collapse(text):
    return _WS.sub(" ", text).strip()


def step_lowercase(text):
    return text.lower()


def step_punctuation_normalize(text):
    for src, dst in PUNCT_MAP.items():
        text = text.replace(src, dst)
    return _collapse(text)


def step_punctuation_strip(text):
    out = "".join(" " if c in PUNCT_CHARS else c for c in text)
    return _collapse(out)


def step_tokenize(text):
    """Whitespace + punctuation splitting: each punctuation char becomes a token."""
    out = []
    for c in text:
        if c in PUNCT_CHARS:
            out.append(f" {c} ")
        else:
            out.append(c)
    return _collapse("".join(out))


STEPS = {
    "lowercase": step_lowercase,
    "punctuation-normalize": step_punctuation_normalize,
    "punctuation-strip": step_punctuation_strip,
    "tokenize": step_tokenize,
}


@dataclass(frozen=True)
class NormalizerRecipe:
    name: str
    steps: tuple = field(default_factory=tuple)

    def __post_init__(self):
        for s in self.steps:
            if s not in STEPS:
                raise ValueError(f"unknown normalization step {s!r}")

    def apply(self, text):
        for s in self.steps:
            text = STEPS[s](text)
        return _collapse(text)


# Named recipes for the language sides used in the experiments, plus the toy task.
RECIPES = {
    "identity": NormalizerRecipe("identity", ()),
    "lowercase": NormalizerRecipe("lowercase", ("lowercase",)),
    "enfr-english": NormalizerRecipe("enfr-english", ("lowercase",)),
    "enfr-french": NormalizerRecipe(
        "enfr-french", ("punctuation-normalize", "tokenize", "lowercase")
    ),
    "enro-english": NormalizerRecipe(
        "enro-english", ("tokenize", "punctuation-strip", "lowercase")
    ),
    "enro-romanian": NormalizerRecipe(
        "enro-romanian", ("punctuation-normalize", "tokenize")
    ),
    "toy": NormalizerRecipe("toy", ("lowercase",)),
}


def get_recipe(name):
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; known: {sorted(RECIPES)}")
    return RECIPES[name]


def normalize(text, recipe):
    """Apply a recipe (by name or instance) to one line of valid UTF-8."""
    if isinstance(recipe, str):
        recipe = get_recipe(recipe)
    return recipe.apply(text)
