"""Frame-bounded batching: length-bucketed, shuffled, one pass per epoch."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff.params import seeded_rng
from ..text.subword import BOS_ID, EOS_ID, PAD_ID


class BatchingError(ValueError):
    pass


@dataclass
class FrameBatch:
    """Padded speech features plus padded target ids (eos-terminated)."""

    ids: list
    features: np.ndarray        # B x T_max x 80, float32, zero padded
    feat_lengths: np.ndarray    # B, int64
    targets: np.ndarray         # B x L_max, int32, pad-filled, ends with eos
    target_lengths: np.ndarray  # B, int64 (including eos)
    total_frames: int

    @property
    def size(self):
        return len(self.ids)

    def decoder_inputs(self):
        """Shift targets right and prepend bos; pad positions stay pad."""
        B, L = self.targets.shape
        dec = np.full((B, L), PAD_ID, dtype=self.targets.dtype)
        dec[:, 0] = BOS_ID
        dec[:, 1:] = self.targets[:, :-1]
        return dec


@dataclass
class TextBatch:
    """Padded source ids (eos-terminated) plus padded target ids."""

    ids: list
    sources: np.ndarray
    source_lengths: np.ndarray
    targets: np.ndarray
    target_lengths: np.ndarray

    @property
    def size(self):
        return len(self.ids)

    def decoder_inputs(self):
        B, L = self.targets.shape
        dec = np.full((B, L), PAD_ID, dtype=self.targets.dtype)
        dec[:, 0] = BOS_ID
        dec[:, 1:] = self.targets[:, :-1]
        return dec


def _seed_key(seed):
    if isinstance(seed, (tuple, list)):
        return tuple(int(s) for s in seed)
    return (int(seed),)


def plan_batches(ids, lengths, max_frames, seed):
    """Group indices into frame-bounded batches; deterministic in ``seed``
    (an int or tuple of ints).

    Records are shuffled, stably sorted by length into buckets, packed
    greedily by real frame count, and the batch order is shuffled again.
    """
    n = len(ids)
    if n == 0:
        return []
    for i, ln in zip(ids, lengths):
        if ln > max_frames:
            raise BatchingError(
                f"utterance {i!r} has {ln} frames, above the {max_frames}-frame budget"
            )
    rng = seeded_rng(*_seed_key(seed), 11)
    order = rng.permutation(n)
    order = order[np.argsort(np.asarray(lengths)[order], kind="stable")]
    batches = []
    current, current_frames = [], 0
    for idx in order:
        ln = lengths[idx]
        if current and current_frames + ln > max_frames:
            batches.append(current)
            current, current_frames = [], 0
        current.append(int(idx))
        current_frames += ln
    if current:
        batches.append(current)
    rng.shuffle(batches)
    return batches


def pad_token_rows(rows, dtype=np.int32):
    """Stack variable-length id lists into a pad-filled matrix."""
    L = max(len(r) for r in rows)
    out = np.full((len(rows), L), PAD_ID, dtype=dtype)
    for i, r in enumerate(rows):
        out[i, : len(r)] = r
    return out, np.array([len(r) for r in rows], dtype=np.int64)


def iter_frame_batches(records, resolver, target_fn, max_frames, seed):
    """Yield FrameBatch objects covering every record exactly once.

    ``target_fn(record) -> list[int]`` supplies target ids without eos;
    eos is appended here.
    """
    lengths = [resolver.num_frames(r) for r in records]
    plan = plan_batches([r.id for r in records], lengths, max_frames, seed)
    for group in plan:
        batch_records = [records[i] for i in group]
        feats = [resolver.frames(r) for r in batch_records]
        T = max(f.shape[0] for f in feats)
        mat = np.zeros((len(group), T, feats[0].shape[1]), dtype=np.float32)
        for i, f in enumerate(feats):
            mat[i, : f.shape[0]] = f
        flens = np.array([f.shape[0] for f in feats], dtype=np.int64)
        tgt_rows = [list(target_fn(r)) + [EOS_ID] for r in batch_records]
        targets, tlens = pad_token_rows(tgt_rows)
        yield FrameBatch(
            ids=[r.id for r in batch_records],
            features=mat,
            feat_lengths=flens,
            targets=targets,
            target_lengths=tlens,
            total_frames=int(flens.sum()),
        )


def iter_text_batches(records, source_fn, target_fn, max_tokens, seed):
    """Token-bounded analog of iter_frame_batches for text-to-text models."""
    src_rows = [list(source_fn(r)) + [EOS_ID] for r in records]
    lengths = [len(s) for s in src_rows]
    plan = plan_batches([r.id for r in records], lengths, max_tokens, seed)
    for group in plan:
        batch_records = [records[i] for i in group]
        sources, slens = pad_token_rows([src_rows[i] for i in group])
        tgt_rows = [list(target_fn(r)) + [EOS_ID] for r in batch_records]
        targets, tlens = pad_token_rows(tgt_rows)
        yield TextBatch(
            ids=[r.id for r in batch_records],
            sources=sources,
            source_lengths=slens,
            targets=targets,
            target_lengths=tlens,
        )
