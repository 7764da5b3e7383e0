"""Triplet completion: translate transcripts (MT arrow) and synthesize speech
for text pairs (TTS arrow), plus mixing of gold and synthetic manifests.

Gold records are never mutated: completion builds new records and mixing
concatenates with origin tags preserved.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff.params import seeded_rng
from ..corpus.records import Manifest, TripletRecord, synth_spec


@dataclass(frozen=True)
class SpeakerPolicy:
    mode: str = "round_robin"   # single | round_robin
    speaker: int = 0            # for single
    roster_size: int | None = None  # None = engine default

    def __post_init__(self):
        if self.mode not in ("single", "round_robin"):
            raise ValueError(f"unknown speaker policy {self.mode!r}")


def mt_complete(asr_pairs, translate_fn, name=None):
    """Fill the translation slot of (speech, transcript) records.

    translate_fn takes a list of transcripts and returns one translation per
    entry (beam decoding of a trained text model, or an oracle in tests);
    None or empty entries count as decode failures. Complete records and
    failures are skipped and reported, never dropped silently.
    """
    candidates = []
    skipped = []
    for r in asr_pairs:
        if r.is_complete():
            skipped.append((r.id, "already complete"))
            continue
        if r.speech is None or r.transcript is None:
            skipped.append((r.id, "needs speech + transcript"))
            continue
        candidates.append(r)
    translations = translate_fn([r.transcript for r in candidates]) if candidates else []
    if len(translations) != len(candidates):
        raise ValueError(
            f"translate_fn returned {len(translations)} results for "
            f"{len(candidates)} transcripts"
        )
    completed = []
    for r, translation in zip(candidates, translations):
        if not translation:
            skipped.append((r.id, "decode failure"))
            continue
        completed.append(r.with_fields(translation=translation, origin="mt_synth"))
    out = Manifest(name=name or f"{asr_pairs.name}+mt", split=asr_pairs.split,
                   records=completed)
    report = {
        "method": "mt_complete",
        "input": len(asr_pairs),
        "completed": len(completed),
        "skipped": [{"id": i, "reason": why} for i, why in skipped],
        "origins": out.origin_histogram(),
    }
    return out, report


def tts_complete(mt_pairs, engine, policy=None, subsample=None, seed=0,
                 from_translation=False, name=None):
    """Fill the speech slot of (transcript, translation) records.

    Subsampling is a seeded draw without replacement; round-robin assigns
    roster speakers cyclically in manifest order. ``from_translation``
    synthesizes from the target-language text instead (the copied-target
    variant); the synthesized-from text then also lands in the transcript
    slot, and the report flags it.
    """
    policy = policy or SpeakerPolicy()
    records = list(mt_pairs)
    if subsample is not None and subsample < len(records):
        rng = seeded_rng(seed, 41)
        keep = sorted(rng.choice(len(records), size=subsample, replace=False))
        records = [records[i] for i in keep]
    roster_n = policy.roster_size
    if roster_n is None:
        roster_n = len(engine.speaker_roster())
    completed = []
    skipped = []
    position = 0
    probe = engine.speaker_roster(1)[0]
    for r in records:
        if r.transcript is None or r.translation is None:
            skipped.append((r.id, "needs transcript + translation"))
            continue
        text = r.translation if from_translation else r.transcript
        tokens = text.split()
        try:
            engine.symbol_lengths(tokens, probe)
        except KeyError as e:
            skipped.append((r.id, f"unknown symbol: {e}"))
            continue
        if policy.mode == "single":
            spk = policy.speaker
        else:
            spk = position % roster_n
        position += 1
        fields = dict(
            speech=synth_spec(engine.engine, engine.seed, text, spk),
            origin="tts_synth",
            speaker=f"{engine.engine}{spk}",
        )
        if from_translation:
            fields["transcript"] = text
        completed.append(r.with_fields(**fields))
    out = Manifest(name=name or f"{mt_pairs.name}+tts", split=mt_pairs.split,
                   records=completed)
    report = {
        "method": "tts_complete",
        "engine": engine.engine,
        "policy": policy.mode,
        "subsample": subsample,
        "seed": seed,
        "from_translation": from_translation,
        "input": len(mt_pairs),
        "completed": len(completed),
        "skipped": [{"id": i, "reason": why} for i, why in skipped],
        "origins": out.origin_histogram(),
    }
    return out, report


def mix(named_manifests, weights=None, name="mix", split="train"):
    """Concatenate manifests with ids namespaced by source name.

    ``weights`` maps source name -> integer duplication count (default 1).
    """
    weights = weights or {}
    records = []
    seen = set()
    for src_name, manifest in named_manifests:
        w = int(weights.get(src_name, 1))
        for copy in range(w):
            suffix = "" if copy == 0 else f"#{copy}"
            for r in manifest:
                new_id = f"{src_name}/{r.id}{suffix}"
                if new_id in seen:
                    raise ValueError(f"id collision after namespacing: {new_id}")
                seen.add(new_id)
                records.append(r.with_fields(id=new_id))
    return Manifest(name=name, split=split, records=records)
