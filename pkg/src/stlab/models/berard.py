"""Recurrent speech model: pyramidal-ish conv + BiLSTM encoder and a stacked
LSTM decoder with top-to-bottom state feedback.

Decoder wiring for N layers, per step t:

    s_t^1, o_t^1 = LSTM^1(s_{t-1}^N, e(y_t))
    c_t          = attention(o_t^1, h)
    s_t^n, o_t^n = LSTM^n(s_t^{n-1}, c_t)        for n = 2..N

i.e. each layer's incoming recurrent state is the state just emitted by the
layer beneath at the same step, and layer 1 receives the top layer's state
from the previous step. Logits read concat(o_t^N, c_t), optionally through a
tanh bottleneck.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..autodiff import ops
from ..autodiff.params import ParameterSet, seeded_rng
from ..autodiff.tensor import Tensor
from .attention import AdditiveAttention
from .base import DecoderState, EncoderOutput, stack_steps
from .layers import (
    BiLSTM,
    Conv2dLayer,
    Embedding,
    Linear,
    LSTMCellParams,
    apply_dropout,
    ceil_div,
    length_mask,
)

ARCH = "berard"


@dataclass
class BerardConfig:
    vocab: int = 200
    features: int = 80
    nonlinear: tuple = (64, 32)     # the two nonlinear input layers
    conv_channels: int = 8          # both conv layers
    conv_kernel: int = 3
    conv_strides: tuple = ((2, 2), (2, 2))  # (time, freq) per conv layer
    lstm_hidden: int = 32           # per direction, 3 bidirectional layers
    embed: int = 32
    dec_hidden: int = 64
    att_dim: int = 48
    att_scale: float = 1.0          # score sharpening before softmax
    dec_layers: int = 2             # N
    logit_bottleneck: int = 0       # 0 = no bottleneck
    dropout: float = 0.0

    def __post_init__(self):
        if self.dec_layers < 1:
            raise ValueError("decoder needs at least one layer")
        self.conv_strides = tuple(tuple(s) for s in self.conv_strides)

    @property
    def enc_dim(self):
        return 2 * self.lstm_hidden

    @property
    def conv_feat_dim(self):
        f = self.nonlinear[1]
        for _, sf in self.conv_strides:
            f = ceil_div(f, sf)
        return self.conv_channels * f

    def subsampled_length(self, t):
        for st, _ in self.conv_strides:
            t = ceil_div(t, st)
        return t


class BerardModel:
    arch = ARCH

    def __init__(self, config, seed=0, dtype=np.float32):
        self.config = config
        self.params = ParameterSet(dtype=dtype)
        ps, cfg = self.params, config
        rng = seeded_rng(seed, 17)
        n1, n2 = cfg.nonlinear
        self.lin1 = Linear(ps, rng, "enc.nl1", cfg.features, n1, "encoder")
        self.lin2 = Linear(ps, rng, "enc.nl2", n1, n2, "encoder")
        self.conv1 = Conv2dLayer(ps, rng, "enc.conv1", 1, cfg.conv_channels,
                                 cfg.conv_kernel, cfg.conv_strides[0], "encoder")
        self.conv2 = Conv2dLayer(ps, rng, "enc.conv2", cfg.conv_channels,
                                 cfg.conv_channels, cfg.conv_kernel,
                                 cfg.conv_strides[1], "encoder")
        din = cfg.conv_feat_dim
        self.bilstm = []
        for i in range(3):
            self.bilstm.append(
                BiLSTM(ps, rng, f"enc.blstm{i}", din, cfg.lstm_hidden, "encoder")
            )
            din = cfg.enc_dim
        self.embedding = Embedding(ps, rng, "dec.embed", cfg.vocab, cfg.embed)
        self.cells = []
        for n in range(cfg.dec_layers):
            din = cfg.embed if n == 0 else cfg.enc_dim
            self.cells.append(
                LSTMCellParams(ps, rng, f"dec.lstm{n}", din, cfg.dec_hidden, "decoder")
            )
        self.attention = AdditiveAttention(ps, rng, "att", cfg.dec_hidden,
                                           cfg.enc_dim, cfg.att_dim,
                                           scale=cfg.att_scale)
        feat = cfg.dec_hidden + cfg.enc_dim
        if cfg.logit_bottleneck:
            self.bottleneck = Linear(ps, rng, "dec.bottleneck", feat,
                                     cfg.logit_bottleneck, "decoder")
            feat = cfg.logit_bottleneck
        else:
            self.bottleneck = None
        self.out = Linear(ps, rng, "dec.logits", feat, cfg.vocab, "decoder")

    # -- encoder --------------------------------------------------------

    def encode(self, features, lengths):
        """features: Tensor (B, T, 80); lengths: (B,) ints."""
        cfg = self.config
        B, T, F = features.shape
        if cfg.subsampled_length(T) < 1:
            raise ValueError(f"input of {T} frames below the encoder receptive field")
        x = ops.tanh(self.lin1(features))
        x = ops.tanh(self.lin2(x))
        x = apply_dropout(x, cfg.dropout)
        x = ops.reshape(x, (B, 1, T, x.shape[2]))
        x = ops.relu(self.conv1(x))
        x = ops.relu(self.conv2(x))  # (B, C, T', F')
        _, C, T2, F2 = x.shape
        x = ops.transpose(x, (0, 2, 1, 3))
        x = ops.reshape(x, (B, T2, C * F2))
        new_lengths = np.array([self.config.subsampled_length(int(l)) for l in lengths])
        for layer in self.bilstm:
            x = layer(x, new_lengths)
        mask = length_mask(new_lengths, T2)
        return EncoderOutput(states=x, lengths=new_lengths, mask=mask,
                             precomputed=self.attention.precompute(x))

    # -- decoder --------------------------------------------------------

    def initial_state(self, batch):
        layers = [self.cells[n].zero_state(batch, self.params.dtype)
                  for n in range(self.config.dec_layers)]
        return DecoderState(layers=layers)

    def decode_step(self, state, y_ids, enc):
        """One teacher-forced / search step; returns (new state, logits)."""
        cfg = self.config
        if len(state.layers) != cfg.dec_layers:
            raise ValueError(
                f"decoder state has {len(state.layers)} layers, config says {cfg.dec_layers}"
            )
        emb = self.embedding(np.asarray(y_ids))
        top_h, top_c = state.layers[-1]
        h1, c1 = self.cells[0].step(emb, top_h, top_c)
        context, weights = self.attention(h1, enc.states, enc.precomputed, enc.mask)
        layers = [(h1, c1)]
        outputs = [h1]
        prev_h, prev_c = h1, c1
        for n in range(1, cfg.dec_layers):
            hn, cn = self.cells[n].step(context, prev_h, prev_c)
            layers.append((hn, cn))
            outputs.append(hn)
            prev_h, prev_c = hn, cn
        feat = ops.concat([outputs[-1], context], axis=1)
        feat = apply_dropout(feat, cfg.dropout)
        if self.bottleneck is not None:
            feat = ops.tanh(self.bottleneck(feat))
        logits = self.out(feat)
        new_state = DecoderState(layers=layers, outputs=outputs,
                                 context=context, attn_weights=weights)
        return new_state, logits

    # -- training -------------------------------------------------------

    def forward_loss_sum(self, batch):
        """Summed token NLL over the batch plus normalization counts."""
        feats = Tensor(batch.features.astype(self.params.dtype, copy=False))
        enc = self.encode(feats, batch.feat_lengths)
        dec_in = batch.decoder_inputs()
        state = self.initial_state(batch.size)
        step_logits = []
        for t in range(dec_in.shape[1]):
            state, logits = self.decode_step(state, dec_in[:, t], enc)
            step_logits.append(logits)
        logits = stack_steps(step_logits)
        return ops.cross_entropy_sum(logits, batch.targets, pad_id=0)
