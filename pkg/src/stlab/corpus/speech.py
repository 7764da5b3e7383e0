"""Realizing the speech slot of a record into frames, lazily and cached."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..audio.featstore import FeatureStore
from ..audio.synth import SynthEngine


def worker_count():
    """Worker threads for feature realization (STLAB_WORKERS, default 1)."""
    try:
        return max(1, int(os.environ.get("STLAB_WORKERS", "1")))
    except ValueError:
        return 1


class SpeechResolver:
    """Turns a record's speech spec into a T x 80 float32 matrix.

    Engines and feature stores are cached; rendered frames are memoized by
    record id up to ``cache_limit`` entries (synthetic rendering is cheap,
    the cache just avoids re-rendering inside one epoch loop).
    """

    def __init__(self, cache_limit=20000):
        self._engines = {}
        self._stores = {}
        self._frames = {}
        self._rosters = {}
        self.cache_limit = cache_limit

    def _engine(self, name, seed):
        key = (name, seed)
        if key not in self._engines:
            self._engines[key] = SynthEngine(name, symbols=None, seed=seed)
        return self._engines[key]

    def _speaker(self, engine, seed, index):
        key = (engine, seed)
        roster = self._rosters.get(key)
        if roster is None or index >= len(roster):
            eng = self._engine(engine, seed)
            roster = eng.speaker_roster(max(index + 1, 5 if engine == "A" else 1))
            self._rosters[key] = roster
        return roster[index]

    def frames(self, record):
        cached = self._frames.get(record.id)
        if cached is not None:
            return cached
        spec = record.speech
        if spec is None:
            raise ValueError(f"record {record.id} has no speech slot")
        if "synth" in spec:
            s = spec["synth"]
            eng = self._engine(s["engine"], s["seed"])
            speaker = self._speaker(s["engine"], s["seed"], s["speaker"])
            out = eng.synthesize(s["text"].split(), speaker, utt_id=record.id).frames
        elif "store" in spec:
            store = self._stores.get(spec["store"])
            if store is None:
                store = self._stores[spec["store"]] = FeatureStore(spec["store"])
            out = store.get(spec["key"]).frames
        else:
            raise ValueError(f"record {record.id}: unknown speech spec {spec}")
        if len(self._frames) < self.cache_limit:
            self._frames[record.id] = out
        return out

    def num_frames(self, record):
        spec = record.speech
        if spec is not None and "synth" in spec:
            s = spec["synth"]
            eng = self._engine(s["engine"], s["seed"])
            speaker = self._speaker(s["engine"], s["seed"], s["speaker"])
            return eng.num_frames(s["text"].split(), speaker)
        return self.frames(record).shape[0]

    def prefetch(self, records):
        """Render features concurrently (rendering is pure, so thread order
        cannot change results); reassembly is by record id."""
        n = worker_count()
        pending = [r for r in records if r.id not in self._frames]
        if n <= 1 or len(pending) < 2 * n:
            return
        # touch engines/rosters up front; the pool only renders
        for r in pending:
            if r.speech and "synth" in r.speech:
                s = r.speech["synth"]
                self._speaker(s["engine"], s["seed"], s["speaker"])
        with ThreadPoolExecutor(max_workers=n) as pool:
            for rec, frames in zip(pending, pool.map(self._render, pending)):
                if len(self._frames) < self.cache_limit:
                    self._frames[rec.id] = frames

    def _render(self, record):
        spec = record.speech
        if spec is not None and "synth" in spec:
            s = spec["synth"]
            eng = self._engine(s["engine"], s["seed"])
            speaker = self._speaker(s["engine"], s["seed"], s["speaker"])
            return eng.synthesize(s["text"].split(), speaker, utt_id=record.id).frames
        return self.frames(record)
