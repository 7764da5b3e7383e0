"""Parameterized building blocks shared by the architectures."""

from __future__ import annotations

import numpy as np

from ..autodiff import ops
from ..autodiff.params import uniform_fan_in
from ..autodiff.tensor import Tensor

# Dropout is keyed by (run seed, step, op instance) through a context the
# training loop installs per forward pass; outside of it dropout is identity.
_dropout_ctx = None


def set_dropout_context(seed, step):
    global _dropout_ctx
    _dropout_ctx = [int(seed), int(step), 0]


def clear_dropout_context():
    global _dropout_ctx
    _dropout_ctx = None


def apply_dropout(x, p):
    if p <= 0.0 or _dropout_ctx is None:
        return x
    _dropout_ctx[2] += 1
    return ops.dropout(x, p, key=tuple(_dropout_ctx))


class Linear:
    def __init__(self, ps, rng, name, din, dout, component, bias=True):
        self.w = ps.add(f"{name}.w", uniform_fan_in(rng, (din, dout), dtype=ps.dtype),
                        component)
        self.b = ps.add(f"{name}.b", np.zeros(dout, dtype=ps.dtype), component) if bias else None

    def __call__(self, x):
        y = ops.matmul(x, self.w)
        return ops.add(y, self.b) if self.b is not None else y


class Embedding:
    def __init__(self, ps, rng, name, vocab, dim, component="embedding"):
        init = uniform_fan_in(rng, (vocab, dim), fan_in=dim, dtype=ps.dtype)
        self.table = ps.add(f"{name}.table", init, component)

    def __call__(self, ids):
        return ops.embedding_lookup(self.table, np.asarray(ids))


class LayerNorm:
    def __init__(self, ps, rng, name, dim, component):
        self.gain = ps.add(f"{name}.gain", np.ones(dim, dtype=ps.dtype), component)
        self.bias = ps.add(f"{name}.bias", np.zeros(dim, dtype=ps.dtype), component)

    def __call__(self, x):
        return ops.layer_norm(x, self.gain, self.bias)


class LSTMCellParams:
    """Fused-gate LSTM cell weights; forget-gate bias starts at 1.0."""

    def __init__(self, ps, rng, name, din, hidden, component):
        self.hidden = hidden
        w = uniform_fan_in(rng, (din + hidden, 4 * hidden), dtype=ps.dtype)
        b = np.zeros(4 * hidden, dtype=ps.dtype)
        b[hidden : 2 * hidden] = 1.0  # forget gate
        self.w = ps.add(f"{name}.w", w, component)
        self.b = ps.add(f"{name}.b", b, component)

    def step(self, x, h, c):
        return ops.lstm_cell(x, h, c, self.w, self.b)

    def zero_state(self, batch, dtype):
        z = Tensor(np.zeros((batch, self.hidden), dtype=dtype))
        return z, Tensor(np.zeros((batch, self.hidden), dtype=dtype))


def run_lstm(cell, xs, h0=None, c0=None):
    """Run a cell over (B, T, D); returns (B, T, H) plus the last state."""
    B, T, _ = xs.shape
    if h0 is None:
        h0, c0 = cell.zero_state(B, xs.dtype)
    h, c = h0, c0
    outs = []
    for t in range(T):
        h, c = cell.step(xs[:, t, :], h, c)
        outs.append(ops.reshape(h, (B, 1, cell.hidden)))
    return ops.concat(outs, axis=1), (h, c)


class BiLSTM:
    """Bidirectional layer; the backward pass runs on length-aware reversal
    so padding never leaks into valid states."""

    def __init__(self, ps, rng, name, din, hidden_per_dir, component):
        self.fwd = LSTMCellParams(ps, rng, f"{name}.fwd", din, hidden_per_dir, component)
        self.bwd = LSTMCellParams(ps, rng, f"{name}.bwd", din, hidden_per_dir, component)

    def __call__(self, xs, lengths):
        out_f, _ = run_lstm(self.fwd, xs)
        rev = ops.reverse_padded(xs, lengths)
        out_b, _ = run_lstm(self.bwd, rev)
        out_b = ops.reverse_padded(out_b, lengths)
        return ops.concat([out_f, out_b], axis=2)


class Conv2dLayer:
    def __init__(self, ps, rng, name, cin, cout, kernel, stride, component,
                 padding=None):
        kh, kw = (kernel, kernel) if isinstance(kernel, int) else kernel
        fan_in = cin * kh * kw
        w = uniform_fan_in(rng, (cout, cin, kh, kw), fan_in=fan_in, dtype=ps.dtype)
        self.w = ps.add(f"{name}.w", w, component)
        self.b = ps.add(f"{name}.b", np.zeros(cout, dtype=ps.dtype), component)
        self.stride = (stride, stride) if isinstance(stride, int) else stride
        self.padding = padding if padding is not None else (kh // 2, kw // 2)

    def __call__(self, x):
        return ops.conv2d(x, self.w, self.b, stride=self.stride, padding=self.padding)


class Conv1dLayer:
    def __init__(self, ps, rng, name, cin, cout, kernel, component, causal=False,
                 bias=True):
        fan_in = cin * kernel
        w = uniform_fan_in(rng, (cout, cin, kernel), fan_in=fan_in, dtype=ps.dtype)
        self.w = ps.add(f"{name}.w", w, component)
        self.b = ps.add(f"{name}.b", np.zeros(cout, dtype=ps.dtype), component) if bias else None
        self.padding = (kernel - 1, 0) if causal else ((kernel - 1) // 2, kernel // 2)

    def __call__(self, x):
        return ops.conv1d(x, self.w, self.b, stride=1, padding=self.padding)


def conv_out_len(length, kernel, stride, padding):
    return (length + 2 * padding - kernel) // stride + 1


def ceil_div(a, b):
    return -(-a // b)


def length_mask(lengths, max_len):
    """(B, max_len) boolean validity mask from per-row lengths."""
    return np.arange(max_len)[None, :] < np.asarray(lengths)[:, None]


def sinusoidal_positions(max_len, dim, dtype=np.float32):
    pos = np.arange(max_len)[:, None].astype(np.float64)
    i = np.arange(dim)[None, :]
    angle = pos / np.power(10000.0, (2 * (i // 2)) / dim)
    enc = np.where(i % 2 == 0, np.sin(angle), np.cos(angle))
    return enc.astype(dtype)
