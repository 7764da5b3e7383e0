"""Held-out contamination filtering of training manifests.

A training record is dropped when its transcript contains, as a contiguous
word subsequence, any held-out transcript of at least ``min_words`` words.
Shorter held-out utterances (e.g. the single word "no") never remove
anything.
"""

from __future__ import annotations

from .records import Manifest


def _held_index(held_manifests, min_words):
    """Set of held word tuples grouped by length."""
    by_len = {}
    for manifest in held_manifests:
        for r in manifest:
            if r.transcript is None:
                continue
            words = tuple(r.transcript.split())
            if len(words) >= min_words:
                by_len.setdefault(len(words), set()).add(words)
    return by_len


def contamination_filter(train, held, min_words=2):
    """Returns (filtered manifest, report dict with the removed ids)."""
    if isinstance(held, Manifest):
        held = [held]
    by_len = _held_index(held, min_words)
    lengths = sorted(by_len)
    kept, removed = [], []
    for r in train:
        words = tuple(r.transcript.split()) if r.transcript else ()
        n = len(words)
        hit = False
        for ln in lengths:
            if ln > n:
                break
            bucket = by_len[ln]
            for i in range(n - ln + 1):
                if words[i : i + ln] in bucket:
                    hit = True
                    break
            if hit:
                break
        if hit:
            removed.append(r.id)
        else:
            kept.append(r)
    filtered = Manifest(name=train.name, split=train.split, records=kept)
    report = {
        "input": len(train),
        "kept": len(kept),
        "removed": len(removed),
        "removed_ids": removed,
        "min_words": min_words,
    }
    return filtered, report
