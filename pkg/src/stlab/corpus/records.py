"""Triplet records, manifests and their JSONL serialization.

Manifest format: one JSON object per line with fields
{id, speech, transcript, translation, origin, speaker}; ``speech`` is null,
{"store": path, "key": utt_id} for stored features, or
{"synth": {"engine": "A"|"B", "seed": int, "text": str, "speaker": int}}
for lazily rendered synthetic speech. ``.gz`` paths are gzip-compressed.
"""

from __future__ import annotations

import gzip
import json
from dataclasses import dataclass, field, replace

ORIGINS = ("gold", "mt_synth", "tts_synth")


class ManifestError(ValueError):
    pass


@dataclass(frozen=True)
class TripletRecord:
    id: str
    speech: dict | None = None
    transcript: str | None = None
    translation: str | None = None
    origin: str = "gold"
    speaker: str | None = None

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ManifestError(f"{self.id}: origin {self.origin!r} not in {ORIGINS}")

    def slots_present(self):
        return sum(x is not None for x in (self.speech, self.transcript, self.translation))

    def is_complete(self):
        return self.slots_present() == 3

    def with_fields(self, **kw):
        return replace(self, **kw)

    def to_json(self):
        return {
            "id": self.id,
            "speech": self.speech,
            "transcript": self.transcript,
            "translation": self.translation,
            "origin": self.origin,
            "speaker": self.speaker,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(
            id=obj["id"],
            speech=obj.get("speech"),
            transcript=obj.get("transcript"),
            translation=obj.get("translation"),
            origin=obj.get("origin", "gold"),
            speaker=obj.get("speaker"),
        )


@dataclass
class Manifest:
    name: str
    split: str  # train / dev / test
    records: list = field(default_factory=list)

    def __post_init__(self):
        ids = [r.id for r in self.records]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})[:3]
            raise ManifestError(f"{self.name}: duplicate record ids, e.g. {dup}")
        if self.split in ("dev", "test"):
            for r in self.records:
                if not r.is_complete():
                    raise ManifestError(
                        f"{self.name}: {self.split} record {r.id} is not a complete triplet"
                    )
        elif self.split == "train":
            for r in self.records:
                if r.slots_present() < 2:
                    raise ManifestError(
                        f"{self.name}: train record {r.id} has fewer than two slots"
                    )

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def ids(self):
        return [r.id for r in self.records]

    def origin_histogram(self):
        hist = {}
        for r in self.records:
            hist[r.origin] = hist.get(r.origin, 0) + 1
        return hist

    def save(self, path):
        opener = gzip.open if str(path).endswith(".gz") else open
        with opener(path, "wt", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")

    @classmethod
    def load(cls, path, name=None, split="train"):
        opener = gzip.open if str(path).endswith(".gz") else open
        records = []
        with opener(path, "rt", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(TripletRecord.from_json(json.loads(line)))
        return cls(name=name or str(path), split=split, records=records)


def synth_spec(engine, seed, text, speaker_index):
    """Speech slot for deterministically rendered synthetic audio."""
    return {"synth": {"engine": engine, "seed": int(seed), "text": text,
                      "speaker": int(speaker_index)}}


def corpus_stats(manifest, resolver=None):
    """Utterance/frame/hour counts plus the per-origin breakdown."""
    n = len(manifest)
    frames = 0
    have_speech = 0
    for r in manifest:
        if r.speech is not None:
            have_speech += 1
            if resolver is not None:
                frames += resolver.num_frames(r)
    hours = frames * 0.010 / 3600.0  # 10 ms hop
    return {
        "name": manifest.name,
        "split": manifest.split,
        "utterances": n,
        "with_speech": have_speech,
        "frames": frames,
        "hours": round(hours, 4),
        "origins": manifest.origin_histogram(),
    }


def stats_table(stats_list):
    """Aligned text table over corpus_stats dicts."""
    cols = ["name", "split", "utterances", "frames", "hours", "origins"]
    rows = [[str(s[c]) for c in cols] for s in stats_list]
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c)
              for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths))]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    return "\n".join(lines)
