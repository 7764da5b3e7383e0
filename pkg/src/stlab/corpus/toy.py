"""Synthetic toy translation task for desk-scale experiments.

Source sentences are 3-12 symbols from a 40-symbol alphabet (s0..s39). The
target applies the symbol-wise dictionary map sN -> tN and then swaps each
adjacent pair starting at even positions, so "s1 s2 s3 s4" becomes
"t2 t1 t4 t3". The mapping is bijective, which makes near-perfect BLEU
reachable in the infinite-data limit. Gold speech is the engine-A rendering
of the source with speakers assigned round-robin.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..audio.synth import SynthEngine
from ..autodiff.params import seeded_rng
from .records import Manifest, TripletRecord, synth_spec

ALPHABET_SIZE = 40
MIN_LEN, MAX_LEN = 3, 12
GOLD_SPEAKERS = 5

SOURCE_SYMBOLS = [f"s{i}" for i in range(ALPHABET_SIZE)]
TARGET_SYMBOLS = [f"t{i}" for i in range(ALPHABET_SIZE)]


def toy_source_to_target(tokens):
    """The declared map: dictionary substitution then adjacent-pair swap."""
    mapped = []
    for tok in tokens:
        if not tok.startswith("s") or not tok[1:].isdigit():
            raise ValueError(f"not a toy source symbol: {tok!r}")
        mapped.append(f"t{tok[1:]}")
    for i in range(0, len(mapped) - 1, 2):
        mapped[i], mapped[i + 1] = mapped[i + 1], mapped[i]
    return mapped


def toy_target_to_source(tokens):
    """Inverse of the declared map (the task is bijective)."""
    swapped = list(tokens)
    for i in range(0, len(swapped) - 1, 2):
        swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
    return [f"s{tok[1:]}" for tok in swapped]


@dataclass(frozen=True)
class ToySizes:
    gold: int = 2000
    asr: int = 8000
    mt: int = 10000
    dev: int = 200
    test: int = 400


def _sample_sentences(rng, count):
    seen = set()
    out = []
    while len(out) < count:
        n = int(rng.integers(MIN_LEN, MAX_LEN + 1))
        sent = tuple(int(x) for x in rng.integers(0, ALPHABET_SIZE, size=n))
        if sent in seen:
            continue
        seen.add(sent)
        out.append([SOURCE_SYMBOLS[i] for i in sent])
    return out


def toy_task(seed, sizes=None):
    """Build the AST / ASR-only / MT-only manifests plus dev and test.

    Returns a dict of manifests: gold (complete triplets), asr (speech +
    transcript), mt (transcript + translation), dev, test. All sentences are
    sampled without replacement, so the splits are disjoint.
    """
    sizes = sizes or ToySizes()
    rng = seeded_rng(seed, 1)
    total = sizes.gold + sizes.asr + sizes.mt + sizes.dev + sizes.test
    sentences = _sample_sentences(rng, total)
    engine_seed = int(seed)
    cursor = 0
    speaker_cursor = 0

    def take(count, name, split, with_speech, with_translation):
        nonlocal cursor, speaker_cursor
        records = []
        for k in range(count):
            tokens = sentences[cursor]
            cursor += 1
            source = " ".join(tokens)
            target = " ".join(toy_source_to_target(tokens))
            speech = None
            speaker = None
            if with_speech:
                spk = speaker_cursor % GOLD_SPEAKERS
                speaker_cursor += 1
                speech = synth_spec("A", engine_seed, source, spk)
                speaker = f"A{spk}"
            records.append(
                TripletRecord(
                    id=f"{name}-{k:06d}",
                    speech=speech,
                    transcript=source,
                    translation=target if with_translation else None,
                    origin="gold",
                    speaker=speaker,
                )
            )
        return Manifest(name=name, split=split, records=records)

    return {
        "gold": take(sizes.gold, "toy-gold", "train", True, True),
        "asr": take(sizes.asr, "toy-asr", "train", True, False),
        "mt": take(sizes.mt, "toy-mt", "train", False, True),
        "dev": take(sizes.dev, "toy-dev", "dev", True, True),
        "test": take(sizes.test, "toy-test", "test", True, True),
    }


def toy_engine(seed, engine="A"):
    """Engine instance over the toy source alphabet (plus target symbols for
    the copied-target variant)."""
    return SynthEngine(engine, SOURCE_SYMBOLS + TARGET_SYMBOLS, seed=seed)
