"""Transformer speech model: VGG-conv frontend (which also provides position
information, so no positional embeddings) and a convolutional target-side
front-end before the decoder stack."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.params import ParameterSet, seeded_rng
from ..autodiff.tensor import Tensor
from .base import EncoderOutput
from .layers import Conv1dLayer, Embedding, LayerNorm, Linear, apply_dropout, length_mask
from .transformer_core import (
    DecoderLayer,
    EncoderLayer,
    causal_mask,
    key_padding_mask,
)
from .vgg import VggFrontend

ARCH = "vgg_transformer"


@dataclass
class VggTransformerConfig:
    vocab: int = 10000
    features: int = 80
    vgg_channels: tuple = (64, 128)
    vgg_kernel: int = 3
    d_model: int = 1024
    enc_layers: int = 14
    dec_layers: int = 4
    heads: int = 16
    ffn: int = 4096
    dropout: float = 0.15
    tgt_embed: int = 128
    dec_conv_layers: int = 4
    dec_conv_channels: int = 256
    dec_conv_kernel: int = 3

    def __post_init__(self):
        if self.d_model % self.heads:
            raise ValueError("heads must divide model size")


class VggTransformerModel:
    arch = ARCH

    def __init__(self, config, seed=0, dtype=np.float32):
        self.config = config
        self.params = ParameterSet(dtype=dtype)
        ps, cfg = self.params, config
        rng = seeded_rng(seed, 29)
        self.frontend = VggFrontend(ps, rng, "enc.vgg", cfg.features,
                                    cfg.vgg_channels, cfg.vgg_kernel)
        self.enc_proj = Linear(ps, rng, "enc.proj", self.frontend.out_dim,
                               cfg.d_model, "encoder")
        self.enc_layers = [
            EncoderLayer(ps, rng, f"enc.layer{i}", cfg.d_model, cfg.heads, cfg.ffn,
                         cfg.dropout, "encoder")
            for i in range(cfg.enc_layers)
        ]
        self.enc_norm = LayerNorm(ps, rng, "enc.norm", cfg.d_model, "encoder")
        self.embedding = Embedding(ps, rng, "dec.embed", cfg.vocab, cfg.tgt_embed)
        self.dec_convs = []
        cin = cfg.tgt_embed
        for i in range(cfg.dec_conv_layers):
            conv = Conv1dLayer(ps, rng, f"dec.conv{i}", cin, cfg.dec_conv_channels,
                               cfg.dec_conv_kernel, "decoder", causal=True)
            norm = LayerNorm(ps, rng, f"dec.conv{i}.norm", cfg.dec_conv_channels,
                             "decoder")
            self.dec_convs.append((conv, norm))
            cin = cfg.dec_conv_channels
        self.dec_proj = Linear(ps, rng, "dec.proj", cin, cfg.d_model, "decoder")
        self.dec_layers = [
            DecoderLayer(ps, rng, f"dec.layer{i}", cfg.d_model, cfg.heads, cfg.ffn,
                         cfg.dropout, "decoder")
            for i in range(cfg.dec_layers)
        ]
        self.dec_norm = LayerNorm(ps, rng, "dec.norm", cfg.d_model, "decoder")
        self.out = Linear(ps, rng, "dec.logits", cfg.d_model, cfg.vocab, "decoder")

    def encode(self, features, lengths):
        cfg = self.config
        B, T, _ = features.shape
        if self.frontend.subsampled_length(T) < 1:
            raise ValueError(f"input of {T} frames below the encoder receptive field")
        x = self.frontend(features)
        x = apply_dropout(self.enc_proj(x), cfg.dropout)
        new_lengths = np.array([self.frontend.subsampled_length(int(l)) for l in lengths])
        mask = length_mask(new_lengths, x.shape[1])
        attn_mask = key_padding_mask(mask)
        for layer in self.enc_layers:
            x = layer(x, attn_mask)
        x = self.enc_norm(x)
        return EncoderOutput(states=x, lengths=new_lengths, mask=mask)

    def _decoder_frontend(self, dec_in):
        """Token ids (B, L) -> (B, L, d_model) through causal convolutions."""
        x = self.embedding(dec_in)                       # (B, L, E)
        x = ops.transpose(x, (0, 2, 1))                  # (B, E, L)
        for conv, norm in self.dec_convs:
            x = conv(x)                                  # causal: no future leak
            x = ops.transpose(x, (0, 2, 1))
            x = ops.relu(norm(x))
            x = ops.transpose(x, (0, 2, 1))
        x = ops.transpose(x, (0, 2, 1))
        return self.dec_proj(x)

    def decode_logits(self, dec_in, enc):
        cfg = self.config
        x = apply_dropout(self._decoder_frontend(dec_in), cfg.dropout)
        self_mask = causal_mask(dec_in.shape[1])
        cross_mask = key_padding_mask(enc.mask)
        for layer in self.dec_layers:
            x = layer(x, enc.states, self_mask, cross_mask)
        return self.out(self.dec_norm(x))

    def forward_loss_sum(self, batch):
        feats = Tensor(batch.features.astype(self.params.dtype, copy=False))
        enc = self.encode(feats, batch.feat_lengths)
        logits = self.decode_logits(batch.decoder_inputs(), enc)
        return ops.cross_entropy_sum(logits, batch.targets, pad_id=0)
