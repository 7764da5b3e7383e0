"""VGG-block encoder with deep bidirectional LSTMs and a location-aware
attention LSTM decoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.params import ParameterSet, seeded_rng
from ..autodiff.tensor import Tensor
from .attention import HybridAttention
from .base import DecoderState, EncoderOutput, stack_steps
from .layers import (
    BiLSTM,
    Embedding,
    Linear,
    LSTMCellParams,
    apply_dropout,
    length_mask,
)
from .vgg import VggFrontend

ARCH = "vgg_lstm"


@dataclass
class VggLstmConfig:
    vocab: int = 10000
    features: int = 80
    vgg_channels: tuple = (64, 128)
    vgg_kernel: int = 3
    lstm_size: int = 1024        # per direction, 5 bidirectional layers
    enc_layers: int = 5
    embed: int = 1024
    dec_hidden: int = 1024
    dec_layers: int = 2
    att_dim: int = 1024
    att_channels: int = 10
    att_filter: int = 201
    dropout: float = 0.0

    @property
    def enc_dim(self):
        return 2 * self.lstm_size


class VggLstmModel:
    arch = ARCH

    def __init__(self, config, seed=0, dtype=np.float32):
        self.config = config
        self.params = ParameterSet(dtype=dtype)
        ps, cfg = self.params, config
        rng = seeded_rng(seed, 23)
        self.frontend = VggFrontend(ps, rng, "enc.vgg", cfg.features,
                                    cfg.vgg_channels, cfg.vgg_kernel)
        din = self.frontend.out_dim
        self.bilstm = []
        for i in range(cfg.enc_layers):
            self.bilstm.append(BiLSTM(ps, rng, f"enc.blstm{i}", din, cfg.lstm_size,
                                      "encoder"))
            din = cfg.enc_dim
        self.embedding = Embedding(ps, rng, "dec.embed", cfg.vocab, cfg.embed)
        self.cells = []
        for n in range(cfg.dec_layers):
            cell_in = cfg.embed if n == 0 else cfg.dec_hidden
            self.cells.append(LSTMCellParams(ps, rng, f"dec.lstm{n}", cell_in,
                                             cfg.dec_hidden, "decoder"))
        self.attention = HybridAttention(ps, rng, "att", cfg.dec_hidden, cfg.enc_dim,
                                         cfg.att_dim, cfg.att_channels, cfg.att_filter)
        self.combine = Linear(ps, rng, "dec.combine", cfg.dec_hidden + cfg.enc_dim,
                              cfg.dec_hidden, "decoder")
        self.out = Linear(ps, rng, "dec.logits", cfg.dec_hidden, cfg.vocab, "decoder")

    def encode(self, features, lengths):
        cfg = self.config
        B, T, _ = features.shape
        if self.frontend.subsampled_length(T) < 1:
            raise ValueError(f"input of {T} frames below the encoder receptive field")
        x = self.frontend(features)
        new_lengths = np.array([self.frontend.subsampled_length(int(l)) for l in lengths])
        for layer in self.bilstm:
            x = layer(x, new_lengths)
            x = apply_dropout(x, cfg.dropout)
        mask = length_mask(new_lengths, x.shape[1])
        return EncoderOutput(states=x, lengths=new_lengths, mask=mask,
                             precomputed=self.attention.precompute(x))

    def initial_state(self, batch, enc):
        layers = [self.cells[n].zero_state(batch, self.params.dtype)
                  for n in range(self.config.dec_layers)]
        return DecoderState(layers=layers,
                            attn_weights=self.attention.initial_weights(enc.mask))

    def decode_step(self, state, y_ids, enc):
        cfg = self.config
        emb = self.embedding(np.asarray(y_ids))
        x = emb
        layers = []
        outputs = []
        for n in range(cfg.dec_layers):
            h_prev, c_prev = state.layers[n]
            h, c = self.cells[n].step(x, h_prev, c_prev)
            layers.append((h, c))
            outputs.append(h)
            x = h
        context, weights = self.attention(outputs[-1], enc.states, enc.precomputed,
                                          enc.mask, state.attn_weights)
        combined = ops.tanh(self.combine(ops.concat([outputs[-1], context], axis=1)))
        combined = apply_dropout(combined, cfg.dropout)
        logits = self.out(combined)
        new_state = DecoderState(layers=layers, outputs=outputs, context=context,
                                 attn_weights=weights)
        return new_state, logits

    def forward_loss_sum(self, batch):
        feats = Tensor(batch.features.astype(self.params.dtype, copy=False))
        enc = self.encode(feats, batch.feat_lengths)
        dec_in = batch.decoder_inputs()
        state = self.initial_state(batch.size, enc)
        step_logits = []
        for t in range(dec_in.shape[1]):
            state, logits = self.decode_step(state, dec_in[:, t], enc)
            step_logits.append(logits)
        logits = stack_steps(step_logits)
        return ops.cross_entropy_sum(logits, batch.targets, pad_id=0)
