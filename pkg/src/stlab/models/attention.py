"""Attention mechanisms: additive (content) and hybrid location-aware."""

from __future__ import annotations

import numpy as np

from ..autodiff import ops
from ..autodiff.params import uniform_fan_in
from ..autodiff.tensor import Tensor


class AdditiveAttention:
    """score_i = v . tanh(Wq q + Wh h_i); weights softmax over real positions.

    ``scale`` sharpens scores before the softmax, which speeds up alignment
    discovery at small widths."""

    def __init__(self, ps, rng, name, query_dim, enc_dim, att_dim, component="attention",
                 scale=1.0):
        self.wq = ps.add(f"{name}.wq", uniform_fan_in(rng, (query_dim, att_dim), dtype=ps.dtype), component)
        self.wh = ps.add(f"{name}.wh", uniform_fan_in(rng, (enc_dim, att_dim), dtype=ps.dtype), component)
        self.v = ps.add(f"{name}.v", uniform_fan_in(rng, (att_dim, 1), dtype=ps.dtype), component)
        self.scale = scale

    def precompute(self, h):
        """(B, T, enc) -> (B, T, att); do this once per utterance."""
        return ops.matmul(h, self.wh)

    def __call__(self, query, h, h_pre, mask, prev_weights=None):
        q = ops.matmul(query, self.wq)                      # (B, att)
        B, att = q.shape
        scores = ops.matmul(ops.tanh(ops.add(h_pre, ops.reshape(q, (B, 1, att)))), self.v)
        scores = ops.reshape(scores, (B, h.shape[1]))
        if self.scale != 1.0:
            scores = ops.scale(scores, self.scale)
        weights = ops.softmax(scores, axis=-1, mask=mask)
        context = ops.matmul(ops.reshape(weights, (B, 1, h.shape[1])), h)
        return ops.reshape(context, (B, h.shape[2])), weights


class HybridAttention:
    """Content + location attention: the previous weights pass through a
    1-d convolution whose features join the additive score."""

    def __init__(self, ps, rng, name, query_dim, enc_dim, att_dim,
                 conv_channels=10, conv_filter=201, component="attention"):
        self.wq = ps.add(f"{name}.wq", uniform_fan_in(rng, (query_dim, att_dim), dtype=ps.dtype), component)
        self.wh = ps.add(f"{name}.wh", uniform_fan_in(rng, (enc_dim, att_dim), dtype=ps.dtype), component)
        self.wf = ps.add(f"{name}.wf", uniform_fan_in(rng, (conv_channels, att_dim), dtype=ps.dtype), component)
        fan = conv_filter
        self.conv_w = ps.add(
            f"{name}.conv.w",
            uniform_fan_in(rng, (conv_channels, 1, conv_filter), fan_in=fan, dtype=ps.dtype),
            component,
        )
        self.v = ps.add(f"{name}.v", uniform_fan_in(rng, (att_dim, 1), dtype=ps.dtype), component)
        self.conv_filter = conv_filter

    def precompute(self, h):
        return ops.matmul(h, self.wh)

    def initial_weights(self, mask):
        """Uniform over real positions (sums to one per row)."""
        m = mask.astype(np.float32)
        return Tensor(m / m.sum(axis=1, keepdims=True))

    def __call__(self, query, h, h_pre, mask, prev_weights):
        B, T, _ = h.shape
        k = self.conv_filter
        pad = ((k - 1) // 2, k // 2)
        loc = ops.conv1d(ops.reshape(prev_weights, (B, 1, T)), self.conv_w,
                         None, stride=1, padding=pad)      # (B, C, T)
        loc = ops.matmul(ops.transpose(loc, (0, 2, 1)), self.wf)  # (B, T, att)
        q = ops.matmul(query, self.wq)
        att = ops.tanh(ops.add(ops.add(h_pre, loc), ops.reshape(q, (B, 1, -1))))
        scores = ops.reshape(ops.matmul(att, self.v), (B, T))
        weights = ops.softmax(scores, axis=-1, mask=mask)
        context = ops.matmul(ops.reshape(weights, (B, 1, T)), h)
        return ops.reshape(context, (B, h.shape[2])), weights
