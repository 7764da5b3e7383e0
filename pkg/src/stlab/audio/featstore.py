"""Feature container file: a zip of .npy matrices keyed by utterance id.

Layout:
    index.json            -- {"format": "stlab-feats-1",
                              "entries": {utt_id: {"file": ..., "speaker": ...,
                                                   "engine": ...}}}
    feats/<n>.npy         -- T x 80 float32 matrix
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

from .frontend import FeatureSequence

FORMAT = "stlab-feats-1"


def write_features(path, sequences):
    """Write an iterable of FeatureSequence; ids must be unique."""
    entries = {}
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        for i, seq in enumerate(sequences):
            if not seq.utt_id:
                raise ValueError("feature sequence without utterance id")
            if seq.utt_id in entries:
                raise ValueError(f"duplicate utterance id {seq.utt_id!r}")
            name = f"feats/{i}.npy"
            buf = io.BytesIO()
            np.save(buf, seq.frames, allow_pickle=False)
            zf.writestr(name, buf.getvalue())
            entries[seq.utt_id] = {
                "file": name, "speaker": seq.speaker_id, "engine": seq.engine,
            }
        zf.writestr(
            "index.json",
            json.dumps({"format": FORMAT, "entries": entries}, sort_keys=True),
        )


class FeatureStore:
    """Read-side of the container; loads lazily by utterance id."""

    def __init__(self, path):
        self.path = str(path)
        with zipfile.ZipFile(self.path, "r") as zf:
            index = json.loads(zf.read("index.json"))
        if index.get("format") != FORMAT:
            raise ValueError(f"{path}: unsupported feature container format")
        self._entries = index["entries"]

    def ids(self):
        return list(self._entries)

    def __contains__(self, utt_id):
        return utt_id in self._entries

    def get(self, utt_id):
        entry = self._entries[utt_id]
        with zipfile.ZipFile(self.path, "r") as zf:
            frames = np.load(io.BytesIO(zf.read(entry["file"])), allow_pickle=False)
        return FeatureSequence(
            frames, utt_id=utt_id, speaker_id=entry["speaker"], engine=entry["engine"]
        )
