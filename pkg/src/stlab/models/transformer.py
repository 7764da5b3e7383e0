"""Text-to-text transformer used for MT, the cascade, and triplet completion."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.params import ParameterSet, seeded_rng
from ..autodiff.tensor import Tensor
from .base import EncoderOutput
from .layers import Embedding, LayerNorm, Linear, apply_dropout, length_mask, sinusoidal_positions
from .transformer_core import (
    DecoderLayer,
    EncoderLayer,
    causal_mask,
    key_padding_mask,
)

ARCH = "transformer_text"


@dataclass
class TransformerTextConfig:
    src_vocab: int = 10000
    tgt_vocab: int = 10000
    d_model: int = 512
    enc_layers: int = 6
    dec_layers: int = 6
    heads: int = 8
    ffn: int = 2048
    dropout: float = 0.1
    positions: str = "sinusoidal"   # sinusoidal | learned
    max_len: int = 512

    def __post_init__(self):
        if self.d_model % self.heads:
            raise ValueError("heads must divide model size")
        if self.positions not in ("sinusoidal", "learned"):
            raise ValueError(f"unknown position mode {self.positions!r}")


class TransformerTextModel:
    arch = ARCH

    def __init__(self, config, seed=0, dtype=np.float32):
        self.config = config
        self.params = ParameterSet(dtype=dtype)
        ps, cfg = self.params, config
        rng = seeded_rng(seed, 31)
        self.src_embed = Embedding(ps, rng, "src.embed", cfg.src_vocab, cfg.d_model)
        self.tgt_embed = Embedding(ps, rng, "tgt.embed", cfg.tgt_vocab, cfg.d_model)
        if cfg.positions == "learned":
            self.src_pos = Embedding(ps, rng, "src.pos", cfg.max_len, cfg.d_model)
            self.tgt_pos = Embedding(ps, rng, "tgt.pos", cfg.max_len, cfg.d_model)
            self._sin = None
        else:
            self.src_pos = self.tgt_pos = None
            self._sin = sinusoidal_positions(cfg.max_len, cfg.d_model, dtype=ps.dtype)
        self.enc_layers = [
            EncoderLayer(ps, rng, f"enc.layer{i}", cfg.d_model, cfg.heads, cfg.ffn,
                         cfg.dropout, "encoder")
            for i in range(cfg.enc_layers)
        ]
        self.enc_norm = LayerNorm(ps, rng, "enc.norm", cfg.d_model, "encoder")
        self.dec_layers = [
            DecoderLayer(ps, rng, f"dec.layer{i}", cfg.d_model, cfg.heads, cfg.ffn,
                         cfg.dropout, "decoder")
            for i in range(cfg.dec_layers)
        ]
        self.dec_norm = LayerNorm(ps, rng, "dec.norm", cfg.d_model, "decoder")
        self.out = Linear(ps, rng, "dec.logits", cfg.d_model, cfg.tgt_vocab, "decoder")
        self._scale = float(np.sqrt(cfg.d_model))

    def _positions(self, side_pos, T, offset=0):
        if T + offset > self.config.max_len:
            raise ValueError(
                f"sequence of {T + offset} tokens beyond max length {self.config.max_len}"
            )
        idx = np.arange(offset, offset + T)
        if side_pos is not None:
            return side_pos(idx)
        return Tensor(self._sin[idx])

    def _embed(self, embed, pos_table, ids, offset=0):
        x = ops.scale(embed(np.asarray(ids)), self._scale)
        pos = self._positions(pos_table, np.asarray(ids).shape[1], offset)
        return ops.add(x, pos)

    def encode(self, src_ids, lengths):
        cfg = self.config
        x = apply_dropout(self._embed(self.src_embed, self.src_pos, src_ids), cfg.dropout)
        mask = length_mask(lengths, np.asarray(src_ids).shape[1])
        attn_mask = key_padding_mask(mask)
        for layer in self.enc_layers:
            x = layer(x, attn_mask)
        x = self.enc_norm(x)
        return EncoderOutput(states=x, lengths=np.asarray(lengths), mask=mask)

    def decode_logits(self, dec_in, enc, caches=None, offset=0):
        """Full-prefix logits when caches is None; one-column step otherwise."""
        cfg = self.config
        x = apply_dropout(
            self._embed(self.tgt_embed, self.tgt_pos, dec_in, offset), cfg.dropout
        )
        L = np.asarray(dec_in).shape[1]
        self_mask = None if caches is not None else causal_mask(L)
        cross_mask = key_padding_mask(enc.mask)
        for i, layer in enumerate(self.dec_layers):
            cache = None if caches is None else caches[i]
            x = layer(x, enc.states, self_mask, cross_mask, cache=cache)
        return self.out(self.dec_norm(x))

    def forward_loss_sum(self, batch):
        enc = self.encode(batch.sources, batch.source_lengths)
        logits = self.decode_logits(batch.decoder_inputs(), enc)
        return ops.cross_entropy_sum(logits, batch.targets, pad_id=0)
