"""Deterministic parametric speech synthesis: two engines, seeded speakers.

Engine A is the hi-fi multi-voice stand-in, engine B the lo-fi single-voice
one (its additive noise is 5x engine A's jitter amplitude). Both map each
symbol to a seeded prototype of 2-4 frames, resample by the speaker's tempo,
add the speaker offset, then smooth with a width-3 moving average for
coarticulation. Output is bitwise-reproducible from
(text, engine, speaker, seed).
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .frontend import N_MELS, FeatureSequence

ENGINE_NOISE_FACTOR = {"A": 1.0, "B": 5.0}
DEFAULT_ROSTER_SIZE = {"A": 5, "B": 1}


@dataclass(frozen=True)
class SpeakerProfile:
    speaker_id: str
    offset: np.ndarray  # length-80 additive vector
    tempo: float        # frames-per-symbol multiplier, in [0.5, 2.0]
    jitter: float       # base noise amplitude

    def __post_init__(self):
        if not 0.5 <= self.tempo <= 2.0:
            raise ValueError(f"tempo {self.tempo} outside [0.5, 2.0]")


def _rng(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def _text_key(tokens):
    return zlib.crc32(" ".join(tokens).encode("utf-8"))


class SynthEngine:
    """One engine instance, optionally restricted to a symbol inventory.

    Prototypes are keyed by (engine seed, engine, symbol string), so two
    engine objects with the same seed render identical features regardless
    of how their inventories were listed.
    """

    def __init__(self, engine, symbols=None, seed=0):
        if engine not in ("A", "B"):
            raise ValueError(f"engine must be 'A' or 'B', got {engine!r}")
        self.engine = engine
        self.seed = int(seed)
        self.symbols = None if symbols is None else list(symbols)
        if self.symbols is not None and len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in inventory")
        self._eng_key = 0 if engine == "A" else 1
        self._prototypes = {}

    def _proto(self, sym):
        proto = self._prototypes.get(sym)
        if proto is None:
            if self.symbols is not None and sym not in self.symbols:
                raise KeyError(f"symbol {sym!r} not in engine {self.engine} inventory")
            rng = _rng(self.seed, self._eng_key, 101, zlib.crc32(sym.encode()))
            length = int(rng.integers(2, 5))  # 2-4 frames
            proto = rng.normal(0.0, 1.0, size=(length, N_MELS))
            self._prototypes[sym] = proto
        return proto

    @property
    def engine_tag(self):
        return f"engine-{self.engine}"

    def speaker_roster(self, n=None):
        """n distinct deterministic speaker profiles (default 5 for A, 1 for B)."""
        n = DEFAULT_ROSTER_SIZE[self.engine] if n is None else int(n)
        if n < 1:
            raise ValueError("roster size must be >= 1")
        roster = []
        for i in range(n):
            rng = _rng(self.seed, self._eng_key, 202, i)
            offset = rng.normal(0.0, 0.5, size=N_MELS)
            tempo = float(rng.uniform(0.7, 1.4))
            jitter = float(rng.uniform(0.03, 0.08))
            roster.append(
                SpeakerProfile(
                    speaker_id=f"{self.engine}{i}", offset=offset,
                    tempo=tempo, jitter=jitter,
                )
            )
        return roster

    def symbol_lengths(self, tokens, speaker):
        """Frames each token contributes: max(1, floor(len * tempo + 0.5))."""
        lengths = []
        for tok in tokens:
            base = self._proto(tok).shape[0]
            lengths.append(max(1, int(np.floor(base * speaker.tempo + 0.5))))
        return lengths

    def num_frames(self, tokens, speaker):
        return sum(self.symbol_lengths(tokens, speaker))

    def synthesize(self, tokens, speaker, *, utt_id="", smooth=True):
        tokens = list(tokens)
        if not tokens:
            raise ValueError("cannot synthesize empty text")
        lengths = self.symbol_lengths(tokens, speaker)
        pieces = []
        for tok, n in zip(tokens, lengths):
            proto = self._proto(tok)
            src = np.round(np.linspace(0, proto.shape[0] - 1, n)).astype(int)
            pieces.append(proto[src])
        feats = np.concatenate(pieces, axis=0) + speaker.offset[None, :]
        if smooth:
            feats = moving_average3(feats)
        amp = speaker.jitter * ENGINE_NOISE_FACTOR[self.engine]
        noise_rng = _rng(self.seed, self._eng_key, 303,
                         zlib.crc32(speaker.speaker_id.encode()), _text_key(tokens))
        feats = feats + noise_rng.normal(0.0, amp, size=feats.shape)
        return FeatureSequence(
            feats.astype(np.float32), utt_id=utt_id,
            speaker_id=speaker.speaker_id, engine=self.engine_tag,
        )


def moving_average3(x):
    """Width-3 moving average along time with replicated edges."""
    padded = np.concatenate([x[:1], x, x[-1:]], axis=0)
    return (padded[:-2] + padded[1:-1] + padded[2:]) / 3.0
