"""Pre-norm transformer layers with optional incremental KV caching."""

from __future__ import annotations

import numpy as np

from ..autodiff import ops
from .layers import LayerNorm, Linear, apply_dropout


class MultiHeadAttention:
    def __init__(self, ps, rng, name, d_model, heads, component):
        if d_model % heads:
            raise ValueError(f"heads {heads} must divide model size {d_model}")
        self.d = d_model
        self.h = heads
        self.dh = d_model // heads
        self.wq = Linear(ps, rng, f"{name}.q", d_model, d_model, component)
        self.wk = Linear(ps, rng, f"{name}.k", d_model, d_model, component)
        self.wv = Linear(ps, rng, f"{name}.v", d_model, d_model, component)
        self.wo = Linear(ps, rng, f"{name}.o", d_model, d_model, component)

    def _split(self, x):
        B, T, _ = x.shape
        return ops.transpose(ops.reshape(x, (B, T, self.h, self.dh)), (0, 2, 1, 3))

    def __call__(self, q_in, kv_in, mask=None, cache=None, static_kv=False):
        """mask broadcasts to (B, H, Tq, Tk): True = may attend.

        ``cache`` (decode only) holds projected keys/values: with
        ``static_kv`` they are computed once and reused (cross attention),
        otherwise new columns are appended each step (self attention).
        """
        B, Tq, _ = q_in.shape
        q = self._split(self.wq(q_in))
        if cache is not None and static_kv and "k" in cache:
            k, v = cache["k"], cache["v"]
        else:
            k = self._split(self.wk(kv_in))
            v = self._split(self.wv(kv_in))
            if cache is not None:
                if not static_kv and "k" in cache:
                    k = ops.concat([cache["k"], k], axis=2)
                    v = ops.concat([cache["v"], v], axis=2)
                cache["k"], cache["v"] = k, v
        scores = ops.scale(ops.matmul(q, ops.transpose(k, (0, 1, 3, 2))),
                           1.0 / np.sqrt(self.dh))
        weights = ops.softmax(scores, axis=-1, mask=mask)
        ctx = ops.matmul(weights, v)
        ctx = ops.reshape(ops.transpose(ctx, (0, 2, 1, 3)), (B, Tq, self.d))
        return self.wo(ctx)


class FeedForward:
    def __init__(self, ps, rng, name, d_model, hidden, component):
        self.lin1 = Linear(ps, rng, f"{name}.ff1", d_model, hidden, component)
        self.lin2 = Linear(ps, rng, f"{name}.ff2", hidden, d_model, component)

    def __call__(self, x):
        return self.lin2(ops.relu(self.lin1(x)))


class EncoderLayer:
    def __init__(self, ps, rng, name, d_model, heads, ffn, dropout, component):
        self.attn = MultiHeadAttention(ps, rng, f"{name}.self", d_model, heads, component)
        self.ff = FeedForward(ps, rng, name, d_model, ffn, component)
        self.norm1 = LayerNorm(ps, rng, f"{name}.norm1", d_model, component)
        self.norm2 = LayerNorm(ps, rng, f"{name}.norm2", d_model, component)
        self.dropout = dropout

    def __call__(self, x, mask):
        n = self.norm1(x)
        h = self.attn(n, n, mask=mask)
        x = ops.add(x, apply_dropout(h, self.dropout))
        h = self.ff(self.norm2(x))
        return ops.add(x, apply_dropout(h, self.dropout))


class DecoderLayer:
    def __init__(self, ps, rng, name, d_model, heads, ffn, dropout, component):
        self.self_attn = MultiHeadAttention(ps, rng, f"{name}.self", d_model, heads, component)
        self.cross_attn = MultiHeadAttention(ps, rng, f"{name}.cross", d_model, heads, component)
        self.ff = FeedForward(ps, rng, name, d_model, ffn, component)
        self.norm1 = LayerNorm(ps, rng, f"{name}.norm1", d_model, component)
        self.norm2 = LayerNorm(ps, rng, f"{name}.norm2", d_model, component)
        self.norm3 = LayerNorm(ps, rng, f"{name}.norm3", d_model, component)
        self.dropout = dropout

    def __call__(self, x, memory, self_mask, cross_mask, cache=None):
        n = self.norm1(x)
        h = self.self_attn(n, n, mask=self_mask,
                           cache=None if cache is None else cache.setdefault("self", {}))
        x = ops.add(x, apply_dropout(h, self.dropout))
        h = self.cross_attn(
            self.norm2(x), memory, mask=cross_mask,
            cache=None if cache is None else cache.setdefault("cross", {}),
            static_kv=True,
        )
        x = ops.add(x, apply_dropout(h, self.dropout))
        h = self.ff(self.norm3(x))
        return ops.add(x, apply_dropout(h, self.dropout))


def causal_mask(T):
    """(1, 1, T, T) lower-triangular validity."""
    return np.tril(np.ones((T, T), dtype=bool))[None, None]


def key_padding_mask(mask_bt):
    """(B, T) validity -> (B, 1, 1, T)."""
    return np.asarray(mask_bt, dtype=bool)[:, None, None, :]


def mha_param_count(d_model):
    return 4 * (d_model * d_model + d_model)


def encoder_layer_count(d_model, ffn):
    return (mha_param_count(d_model) + d_model * ffn + ffn + ffn * d_model + d_model
            + 2 * 2 * d_model)


def decoder_layer_count(d_model, ffn):
    return (2 * mha_param_count(d_model) + d_model * ffn + ffn + ffn * d_model
            + d_model + 3 * 2 * d_model)
