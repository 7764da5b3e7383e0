"""Greedy and batched beam decoding over all architectures.

Beam variant: at each step the top-``width`` extensions survive; a beam that
emits eos retires (its row goes dead) and the final answer is the finished
hypothesis with the best length-normalized score logp / len**alpha. With
width 1 this reduces exactly to greedy search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import no_grad, ops
from ..autodiff.tensor import Tensor
from ..models.base import DecoderState
from ..text.subword import BOS_ID, EOS_ID


@dataclass
class DecodeConfig:
    mode: str = "beam"          # beam | greedy
    width: int = 5
    alpha: float = 1.0          # length-normalization power
    max_len_factor: float = 1.5
    max_len_cap: int = 200

    def __post_init__(self):
        if self.mode not in ("beam", "greedy"):
            raise ValueError(f"unknown decode mode {self.mode!r}")
        if self.width < 1:
            raise ValueError("beam width must be >= 1")
        if self.alpha < 0:
            raise ValueError("length penalty must be >= 0")

    def max_lens(self, src_lengths):
        out = np.maximum(4, (np.asarray(src_lengths) * self.max_len_factor).astype(int) + 5)
        return np.minimum(out, self.max_len_cap)


def _expand_rows(arr, width):
    return np.repeat(arr, width, axis=0)


def _expand_enc(enc, width):
    from ..models.base import EncoderOutput
    if width == 1:
        return enc
    pre = None
    if enc.precomputed is not None:
        pre = Tensor(_expand_rows(enc.precomputed.data, width))
    return EncoderOutput(
        states=Tensor(_expand_rows(enc.states.data, width)),
        lengths=_expand_rows(enc.lengths, width),
        mask=_expand_rows(enc.mask, width),
        precomputed=pre,
    )


class RecurrentSession:
    """Stepper for the recurrent architectures (stateful decoder cells)."""

    def __init__(self, model, features, lengths):
        self.model = model
        with no_grad():
            self.enc_base = model.encode(Tensor(features.astype(model.params.dtype)),
                                         lengths)
        self.B = features.shape[0]
        self.vocab = model.config.vocab
        self.src_lengths = self.enc_base.lengths

    def start(self, width):
        self.enc = _expand_enc(self.enc_base, width)
        rows = self.B * width
        if self.model.arch == "vgg_lstm":
            return self.model.initial_state(rows, self.enc)
        return self.model.initial_state(rows)

    def step(self, state, tokens):
        with no_grad():
            state, logits = self.model.decode_step(state, tokens, self.enc)
            logp = ops.log_softmax(logits).data
        return state, logp

    def reorder(self, state, idx):
        layers = [(Tensor(h.data[idx]), Tensor(c.data[idx])) for h, c in state.layers]
        weights = None
        if state.attn_weights is not None:
            weights = Tensor(state.attn_weights.data[idx])
        return DecoderState(layers=layers, attn_weights=weights)


class TextTransformerSession:
    """Incremental transformer stepper with per-layer KV caches."""

    def __init__(self, model, sources, lengths):
        self.model = model
        with no_grad():
            self.enc_base = model.encode(sources, lengths)
        self.B = np.asarray(sources).shape[0]
        self.vocab = model.config.tgt_vocab
        self.src_lengths = np.asarray(lengths)

    def start(self, width):
        self.enc = _expand_enc(self.enc_base, width)
        caches = [dict() for _ in self.model.dec_layers]
        return [caches, 0]

    def step(self, state, tokens):
        caches, offset = state
        with no_grad():
            logits = self.model.decode_logits(np.asarray(tokens)[:, None], self.enc,
                                              caches=caches, offset=offset)
            logp = ops.log_softmax(logits).data[:, 0, :]
        return [caches, offset + 1], logp

    def reorder(self, state, idx):
        caches, offset = state
        new_caches = []
        for layer_cache in caches:
            moved = {}
            for part, kv in layer_cache.items():
                moved[part] = {k: Tensor(v.data[idx]) for k, v in kv.items()}
            new_caches.append(moved)
        return [new_caches, offset]


class PrefixSession:
    """Recompute-the-prefix stepper (convolutional transformer decoder)."""

    def __init__(self, model, features, lengths):
        self.model = model
        with no_grad():
            self.enc_base = model.encode(Tensor(features.astype(model.params.dtype)),
                                         lengths)
        self.B = features.shape[0]
        self.vocab = model.config.vocab
        self.src_lengths = self.enc_base.lengths

    def start(self, width):
        self.enc = _expand_enc(self.enc_base, width)
        return np.zeros((self.B * width, 0), dtype=np.int64)

    def step(self, state, tokens):
        prefix = np.concatenate([state, np.asarray(tokens)[:, None]], axis=1)
        with no_grad():
            logits = self.model.decode_logits(prefix, self.enc)
            logp = ops.log_softmax(logits[:, -1, :]).data
        return prefix, logp

    def reorder(self, state, idx):
        return state[idx]


def open_session(model, inputs, lengths):
    """inputs: features (B, T, 80) for speech archs, token ids for text."""
    if model.arch in ("berard", "vgg_lstm"):
        return RecurrentSession(model, inputs, lengths)
    if model.arch == "vgg_transformer":
        return PrefixSession(model, inputs, lengths)
    if model.arch == "transformer_text":
        return TextTransformerSession(model, inputs, lengths)
    raise KeyError(f"no decode session for arch {model.arch!r}")


def greedy_search(session, cfg):
    B = session.B
    max_lens = cfg.max_lens(session.src_lengths)
    state = session.start(1)
    tokens = np.full(B, BOS_ID, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    outputs = [[] for _ in range(B)]
    for t in range(int(max_lens.max())):
        state, logp = session.step(state, tokens)
        nxt = logp.argmax(axis=-1)
        for b in range(B):
            if not alive[b]:
                continue
            tok = int(nxt[b])
            if tok == EOS_ID or t + 1 >= max_lens[b]:
                if tok != EOS_ID:
                    outputs[b].append(tok)
                alive[b] = False
            else:
                outputs[b].append(tok)
        if not alive.any():
            break
        tokens = nxt
    return outputs


def beam_search(session, cfg):
    B, W = session.B, cfg.width
    V = session.vocab
    max_lens = cfg.max_lens(session.src_lengths)
    state = session.start(W)
    R = B * W
    tokens = np.full(R, BOS_ID, dtype=np.int64)
    scores = np.full((B, W), -np.inf)
    scores[:, 0] = 0.0
    grown = np.zeros((R, 0), dtype=np.int64)
    finished = [[] for _ in range(B)]  # (ids list, normalized score)

    for t in range(int(max_lens.max())):
        state, logp = session.step(state, tokens)
        cand = scores[:, :, None] + logp.reshape(B, W, V)
        flat = cand.reshape(B, W * V)
        top = np.argsort(-flat, axis=1)[:, :W]
        new_scores = np.take_along_axis(flat, top, axis=1)
        beam_src = top // V
        new_tok = top % V
        rows = (np.arange(B)[:, None] * W + beam_src).reshape(-1)
        state = session.reorder(state, rows)
        grown = np.concatenate([grown[rows], new_tok.reshape(-1, 1)], axis=1)
        tokens = new_tok.reshape(-1)
        scores = new_scores
        for b in range(B):
            limit = max_lens[b]
            for w in range(W):
                s = scores[b, w]
                if not np.isfinite(s):
                    continue
                tok = new_tok[b, w]
                done = tok == EOS_ID or t + 1 >= limit
                if done:
                    ids = [int(x) for x in grown[b * W + w]]
                    if ids and ids[-1] == EOS_ID:
                        ids = ids[:-1]
                    length = t + 1
                    finished[b].append((ids, float(s) / (length ** cfg.alpha)))
                    scores[b, w] = -np.inf
        if not np.isfinite(scores).any():
            break
    results = []
    for b in range(B):
        if not finished[b]:
            results.append(([], -np.inf))
        else:
            results.append(max(finished[b], key=lambda p: p[1]))
    return results


def decode_session(session, cfg):
    """Returns id sequences (no bos/eos), one per input row."""
    if cfg.mode == "greedy":
        return greedy_search(session, cfg)
    return [ids for ids, _ in beam_search(session, cfg)]


def force_score(session, sequences, alpha=1.0):
    """Length-normalized model log-probability of given output sequences."""
    B = session.B
    state = session.start(1)
    seqs = [list(s) + [EOS_ID] for s in sequences]
    L = max(len(s) for s in seqs)
    total = np.zeros(B)
    tokens = np.full(B, BOS_ID, dtype=np.int64)
    for t in range(L):
        state, logp = session.step(state, tokens)
        nxt = np.array([s[t] if t < len(s) else EOS_ID for s in seqs])
        for b in range(B):
            if t < len(seqs[b]):
                total[b] += logp[b, nxt[b]]
        tokens = nxt
    return np.array([total[b] / (len(seqs[b]) ** alpha) for b in range(B)])


def decode_in_chunks(model, inputs_list, lengths_fn, cfg, chunk=128, pad_value=0.0):
    """Batch a list of variable-length inputs through the decoder.

    inputs_list: list of (T_i, 80) arrays for speech or id lists for text.
    Returns one id sequence per input.
    """
    results = []
    for lo in range(0, len(inputs_list), chunk):
        part = inputs_list[lo : lo + chunk]
        if isinstance(part[0], np.ndarray) and part[0].ndim == 2:
            T = max(p.shape[0] for p in part)
            mat = np.zeros((len(part), T, part[0].shape[1]), dtype=np.float32)
            for i, p in enumerate(part):
                mat[i, : p.shape[0]] = p
            lengths = np.array([p.shape[0] for p in part])
            session = open_session(model, mat, lengths)
        else:
            L = max(len(p) for p in part)
            mat = np.zeros((len(part), L), dtype=np.int64)
            for i, p in enumerate(part):
                mat[i, : len(p)] = p
            lengths = np.array([len(p) for p in part])
            session = open_session(model, mat, lengths)
        results.extend(decode_session(session, cfg))
    return results
