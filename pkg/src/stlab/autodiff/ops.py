"""Differentiable primitives and fused blocks over numpy arrays.

Every function takes/returns :class:`~stlab.autodiff.tensor.Tensor` and
records a backward closure when grad mode is on. Fused blocks (lstm_cell,
cross_entropy, layer_norm) exist so the per-step Python overhead stays low
on CPU; each one is covered by the finite-difference suite like the plain
primitives.
"""

from __future__ import annotations

import numpy as np

from .tensor import NonFiniteError, ShapeError, Tensor, record


def _unbroadcast(g, shape):
    """Sum gradient over axes that were broadcast in the forward pass."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g.reshape(shape)


def _g(grads, i=0):
    return grads[i]


# ---------------------------------------------------------------------------
# elementwise arithmetic
# ---------------------------------------------------------------------------

def add(a, b):
    try:
        out = Tensor(a.data + b.data)
    except ValueError:
        raise ShapeError(f"add: shapes {a.shape} and {b.shape} do not broadcast")

    def backward(grads):
        g = _g(grads)
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g, b.shape))

    record((a, b), (out,), backward)
    return out


def sub(a, b):
    try:
        out = Tensor(a.data - b.data)
    except ValueError:
        raise ShapeError(f"sub: shapes {a.shape} and {b.shape} do not broadcast")

    def backward(grads):
        g = _g(grads)
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(-g, b.shape))

    record((a, b), (out,), backward)
    return out


def mul(a, b):
    try:
        out = Tensor(a.data * b.data)
    except ValueError:
        raise ShapeError(f"mul: shapes {a.shape} and {b.shape} do not broadcast")
    a_data, b_data = a.data, b.data

    def backward(grads):
        g = _g(grads)
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g * b_data, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(g * a_data, b.shape))

    record((a, b), (out,), backward)
    return out


def div(a, b):
    try:
        out = Tensor(a.data / b.data)
    except ValueError:
        raise ShapeError(f"div: shapes {a.shape} and {b.shape} do not broadcast")
    a_data, b_data = a.data, b.data

    def backward(grads):
        g = _g(grads)
        if a.requires_grad:
            a.accumulate_grad(_unbroadcast(g / b_data, a.shape))
        if b.requires_grad:
            b.accumulate_grad(_unbroadcast(-g * a_data / (b_data * b_data), b.shape))

    record((a, b), (out,), backward)
    return out


def scale(a, s):
    """Multiply by a python scalar (cheaper than a constant-tensor mul)."""
    out = Tensor(a.data * s)

    def backward(grads):
        a.accumulate_grad(_g(grads) * s)

    record((a,), (out,), backward)
    return out


# ---------------------------------------------------------------------------
# linear algebra and shaping
# ---------------------------------------------------------------------------

def _bmm(a, b):
    """Batched matmul that keeps BLAS fast: contiguous operands for the
    stacked case, and no tiny per-row GEMM loops."""
    if a.ndim > 2 and not a.flags["C_CONTIGUOUS"]:
        a = np.ascontiguousarray(a)
    if b.ndim > 2 and not b.flags["C_CONTIGUOUS"]:
        b = np.ascontiguousarray(b)
    return np.matmul(a, b)


def matmul(a, b):
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError(f"matmul: operands must be >=2-d, got {a.shape} @ {b.shape}")
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul: inner dims differ, {a.shape} @ {b.shape}")
    a_data, b_data = a.data, b.data
    if a.ndim > 2 and b.ndim == 2:
        # stack-of-rows times matrix: one big GEMM instead of a batch loop
        lead = a_data.shape[:-1]
        flat = a_data.reshape(-1, a_data.shape[-1])
        out = Tensor((flat @ b_data).reshape(lead + (b_data.shape[-1],)))

        def backward(grads):
            g = _g(grads)
            g2 = g.reshape(-1, g.shape[-1])
            if a.requires_grad:
                a.accumulate_grad((g2 @ b_data.T).reshape(a_data.shape))
            if b.requires_grad:
                b.accumulate_grad(flat.T @ g2)

        record((a, b), (out,), backward)
        return out
    out = Tensor(_bmm(a_data, b_data))

    def backward(grads):
        g = _g(grads)
        if a.requires_grad:
            ga = _bmm(g, np.swapaxes(b_data, -1, -2))
            a.accumulate_grad(_unbroadcast(ga, a.shape))
        if b.requires_grad:
            gb = _bmm(np.swapaxes(a_data, -1, -2), g)
            b.accumulate_grad(_unbroadcast(gb, b.shape))

    record((a, b), (out,), backward)
    return out


def transpose(a, axes=None):
    out = Tensor(np.transpose(a.data, axes))
    inv = None if axes is None else tuple(np.argsort(axes))

    def backward(grads):
        a.accumulate_grad(np.transpose(_g(grads), inv))

    record((a,), (out,), backward)
    return out


def reshape(a, shape):
    try:
        out = Tensor(a.data.reshape(shape))
    except ValueError:
        raise ShapeError(f"reshape: cannot view {a.shape} as {shape}")
    old_shape = a.shape

    def backward(grads):
        a.accumulate_grad(_g(grads).reshape(old_shape))

    record((a,), (out,), backward)
    return out


def concat(tensors, axis=0):
    if not tensors:
        raise ShapeError("concat: empty input list")
    try:
        out = Tensor(np.concatenate([t.data for t in tensors], axis=axis))
    except ValueError:
        raise ShapeError(
            f"concat: shapes {[t.shape for t in tensors]} do not align on axis {axis}"
        )
    sizes = [t.shape[axis] for t in tensors]
    offsets = np.cumsum(sizes)[:-1]

    def backward(grads):
        pieces = np.split(_g(grads), offsets, axis=axis)
        for t, piece in zip(tensors, pieces):
            if t.requires_grad:
                t.accumulate_grad(piece)

    record(tuple(tensors), (out,), backward)
    return out


def index(a, idx):
    """Basic (slice/int/ellipsis) indexing; the spec's slice primitive."""
    out = Tensor(a.data[idx])
    shape = a.shape
    dtype = a.data.dtype

    def backward(grads):
        full = np.zeros(shape, dtype=dtype)
        full[idx] += _g(grads)
        a.accumulate_grad(full)

    record((a,), (out,), backward)
    return out


def reduce_sum(a, axis=None, keepdims=False):
    out = Tensor(a.data.sum(axis=axis, keepdims=keepdims))
    shape = a.shape

    def backward(grads):
        g = _g(grads)
        if axis is not None and not keepdims:
            g = g.reshape(_kept_shape(shape, axis))
        a.accumulate_grad(np.broadcast_to(g, shape).copy())

    record((a,), (out,), backward)
    return out


def _kept_shape(shape, axis):
    if isinstance(axis, int):
        axis = (axis,)
    axis = tuple(ax % len(shape) for ax in axis)
    return tuple(1 if i in axis else s for i, s in enumerate(shape))


def reduce_mean(a, axis=None, keepdims=False):
    n = a.size if axis is None else np.prod([a.shape[ax] for ax in np.atleast_1d(axis)])
    return scale(reduce_sum(a, axis=axis, keepdims=keepdims), 1.0 / float(n))


def reverse_padded(a, lengths):
    """Reverse the first ``lengths[b]`` steps of each row along axis 1.

    The padded tail is left in place, which makes the op its own inverse;
    used to run the backward direction of a bidirectional recurrent layer
    without letting padding leak into valid states.
    """
    if a.ndim < 2:
        raise ShapeError(f"reverse_padded: need (B, T, ...) input, got {a.shape}")
    B, T = a.shape[0], a.shape[1]
    lengths = np.asarray(lengths, dtype=np.int64)
    if lengths.shape != (B,):
        raise ShapeError(f"reverse_padded: lengths shape {lengths.shape} != ({B},)")
    if (lengths < 1).any() or (lengths > T).any():
        raise ShapeError("reverse_padded: lengths out of range")
    t = np.arange(T)[None, :]
    idx = np.where(t < lengths[:, None], lengths[:, None] - 1 - t, t)
    rows = np.arange(B)[:, None]
    out = Tensor(a.data[rows, idx])

    def backward(grads):
        a.accumulate_grad(_g(grads)[rows, idx])

    record((a,), (out,), backward)
    return out


# ---------------------------------------------------------------------------
# nonlinearities
# ---------------------------------------------------------------------------

def sigmoid(a):
    with np.errstate(over="ignore"):
        y = 1.0 / (1.0 + np.exp(-a.data))
    out = Tensor(y)

    def backward(grads):
        a.accumulate_grad(_g(grads) * y * (1.0 - y))

    record((a,), (out,), backward)
    return out


def tanh(a):
    y = np.tanh(a.data)
    out = Tensor(y)

    def backward(grads):
        a.accumulate_grad(_g(grads) * (1.0 - y * y))

    record((a,), (out,), backward)
    return out


def relu(a):
    mask = a.data > 0
    out = Tensor(np.where(mask, a.data, 0.0))

    def backward(grads):
        a.accumulate_grad(_g(grads) * mask)

    record((a,), (out,), backward)
    return out


def softmax(a, axis=-1, mask=None):
    """Stable softmax; positions where ``mask`` is False get exactly zero."""
    x = a.data
    if mask is not None:
        mask = np.broadcast_to(np.asarray(mask, dtype=bool), x.shape)
        m = np.max(x, axis=axis, keepdims=True, where=mask, initial=-np.inf)
        if not np.isfinite(m).all():
            raise ShapeError("softmax: a row is fully masked")
        # masked entries may exceed the valid max; cap the exponent at 0,
        # the mask multiply below zeroes them exactly
        d = np.minimum(x - m, 0.0)
        e = np.exp(d, out=d)
        e *= mask
    else:
        e = np.exp(x - x.max(axis=axis, keepdims=True))
    y = e / e.sum(axis=axis, keepdims=True)
    out = Tensor(y)

    def backward(grads):
        g = _g(grads)
        a.accumulate_grad(y * (g - (g * y).sum(axis=axis, keepdims=True)))

    record((a,), (out,), backward)
    return out


def log_softmax(a, axis=-1):
    x = a.data
    m = x.max(axis=axis, keepdims=True)
    z = x - m
    lse = np.log(np.exp(z).sum(axis=axis, keepdims=True))
    y = z - lse
    out = Tensor(y)

    def backward(grads):
        g = _g(grads)
        a.accumulate_grad(g - np.exp(y) * g.sum(axis=axis, keepdims=True))

    record((a,), (out,), backward)
    return out


def layer_norm(a, gain=None, bias=None, eps=1e-5):
    """Normalize the last axis to zero mean / unit variance, then affine."""
    x = a.data
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xh = xc * inv
    if (gain is None) != (bias is None):
        raise ShapeError("layer_norm: gain and bias must be given together")
    affine = gain is not None
    y = xh * gain.data + bias.data if affine else xh
    out = Tensor(y)

    def backward(grads):
        g = _g(grads)
        dxh = g * gain.data if affine else g
        dx = inv * (
            dxh
            - dxh.mean(axis=-1, keepdims=True)
            - xh * (dxh * xh).mean(axis=-1, keepdims=True)
        )
        if a.requires_grad:
            a.accumulate_grad(dx)
        if affine and gain.requires_grad:
            red = tuple(range(g.ndim - 1))
            gain.accumulate_grad((g * xh).sum(axis=red))
            bias.accumulate_grad(g.sum(axis=red))

    parents = (a, gain, bias) if affine else (a,)
    record(parents, (out,), backward)
    return out


# ---------------------------------------------------------------------------
# convolutions and pooling
# ---------------------------------------------------------------------------

def conv2d(a, w, b=None, stride=(1, 1), padding=(0, 0)):
    """2-d convolution (cross-correlation) over (B, C, H, W) input."""
    if a.ndim != 4 or w.ndim != 4:
        raise ShapeError(f"conv2d: need 4-d input/kernel, got {a.shape}, {w.shape}")
    B, C, H, W = a.shape
    O, Cw, kh, kw = w.shape
    if C != Cw:
        raise ShapeError(f"conv2d: input channels {C} != kernel channels {Cw}")
    sh, sw = stride
    ph, pw = padding
    Hp, Wp = H + 2 * ph, W + 2 * pw
    if Hp < kh or Wp < kw:
        raise ShapeError(
            f"conv2d: padded input ({Hp}x{Wp}) smaller than kernel ({kh}x{kw})"
        )
    xp = np.pad(a.data, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    win = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    win = win[:, :, ::sh, ::sw]  # (B, C, Ho, Wo, kh, kw) view
    y = np.einsum("bchwij,ocij->bohw", win, w.data, optimize=True)
    if b is not None:
        y = y + b.data[:, None, None]
    out = Tensor(y)
    Ho, Wo = y.shape[2], y.shape[3]

    def backward(grads):
        g = _g(grads)
        if w.requires_grad:
            w.accumulate_grad(np.einsum("bchwij,bohw->ocij", win, g, optimize=True))
        if b is not None and b.requires_grad:
            b.accumulate_grad(g.sum(axis=(0, 2, 3)))
        if a.requires_grad:
            gw = np.einsum("bohw,ocij->bchwij", g, w.data, optimize=True)
            dxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    dxp[:, :, i : i + sh * Ho : sh, j : j + sw * Wo : sw] += gw[
                        :, :, :, :, i, j
                    ]
            a.accumulate_grad(dxp[:, :, ph : ph + H, pw : pw + W])

    parents = (a, w) if b is None else (a, w, b)
    record(parents, (out,), backward)
    return out


def conv1d(a, w, b=None, stride=1, padding=(0, 0)):
    """1-d convolution over (B, C, T); ``padding`` is (left, right)."""
    if a.ndim != 3 or w.ndim != 3:
        raise ShapeError(f"conv1d: need 3-d input/kernel, got {a.shape}, {w.shape}")
    B, C, T = a.shape
    O, Cw, k = w.shape
    if C != Cw:
        raise ShapeError(f"conv1d: input channels {C} != kernel channels {Cw}")
    pl, pr = padding
    Tp = T + pl + pr
    if Tp < k:
        raise ShapeError(f"conv1d: padded length {Tp} smaller than kernel {k}")
    xp = np.pad(a.data, ((0, 0), (0, 0), (pl, pr)))
    win = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)[:, :, ::stride]
    y = np.einsum("bcti,oci->bot", win, w.data, optimize=True)
    if b is not None:
        y = y + b.data[:, None]
    out = Tensor(y)
    To = y.shape[2]

    def backward(grads):
        g = _g(grads)
        if w.requires_grad:
            w.accumulate_grad(np.einsum("bcti,bot->oci", win, g, optimize=True))
        if b is not None and b.requires_grad:
            b.accumulate_grad(g.sum(axis=(0, 2)))
        if a.requires_grad:
            gw = np.einsum("bot,oci->bcti", g, w.data, optimize=True)
            dxp = np.zeros_like(xp)
            for i in range(k):
                dxp[:, :, i : i + stride * To : stride] += gw[:, :, :, i]
            a.accumulate_grad(dxp[:, :, pl : pl + T])

    parents = (a, w) if b is None else (a, w, b)
    record(parents, (out,), backward)
    return out


def max_pool2d(a, kernel=2, stride=None):
    """Max pooling with ceil semantics: partial windows at the edge count."""
    if a.ndim != 4:
        raise ShapeError(f"max_pool2d: need (B, C, H, W), got {a.shape}")
    k = kernel
    s = stride or kernel
    if s != k:
        raise ShapeError("max_pool2d: only stride == kernel is supported")
    B, C, H, W = a.shape
    Ho, Wo = -(-H // k), -(-W // k)
    pad_h, pad_w = Ho * k - H, Wo * k - W
    xp = np.pad(
        a.data, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), constant_values=-np.inf
    )
    win = xp.reshape(B, C, Ho, k, Wo, k).transpose(0, 1, 2, 4, 3, 5).reshape(
        B, C, Ho, Wo, k * k
    )
    arg = win.argmax(axis=-1)
    y = np.take_along_axis(win, arg[..., None], axis=-1)[..., 0]
    out = Tensor(y)

    def backward(grads):
        g = _g(grads)
        gwin = np.zeros((B, C, Ho, Wo, k * k), dtype=g.dtype)
        np.put_along_axis(gwin, arg[..., None], g[..., None], axis=-1)
        gxp = gwin.reshape(B, C, Ho, Wo, k, k).transpose(0, 1, 2, 4, 3, 5).reshape(
            B, C, Ho * k, Wo * k
        )
        a.accumulate_grad(gxp[:, :, :H, :W])

    record((a,), (out,), backward)
    return out


# ---------------------------------------------------------------------------
# lookup, dropout
# ---------------------------------------------------------------------------

def embedding_lookup(table, ids):
    """Row gather from (V, D) table; ids is an integer ndarray of any shape."""
    if table.ndim != 2:
        raise ShapeError(f"embedding_lookup: table must be 2-d, got {table.shape}")
    ids = np.asarray(ids)
    if not np.issubdtype(ids.dtype, np.integer):
        raise ShapeError("embedding_lookup: ids must be integers")
    V = table.shape[0]
    if ids.size and (ids.min() < 0 or ids.max() >= V):
        raise ShapeError(f"embedding_lookup: id out of range [0, {V})")
    out = Tensor(table.data[ids])

    def backward(grads):
        g = _g(grads)
        dt = np.zeros_like(table.data)
        np.add.at(dt, ids.reshape(-1), g.reshape(-1, table.shape[1]))
        table.accumulate_grad(dt)

    record((table,), (out,), backward)
    return out


def dropout(a, p, key):
    """Zero entries with probability p; survivors scaled by 1/(1-p).

    The mask comes from a counter-based generator keyed by ``key`` (a tuple
    of ints such as (run_seed, step, op_instance)) so runs replay exactly.
    """
    if not 0.0 <= p < 1.0:
        raise ShapeError(f"dropout: p must be in [0, 1), got {p}")
    if p == 0.0:
        return a
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))
    draw_dtype = a.data.dtype if a.data.dtype in (np.float32, np.float64) else np.float64
    mask = (rng.random(a.shape, dtype=draw_dtype) >= p).astype(a.data.dtype)
    mask /= 1.0 - p
    out = Tensor(a.data * mask)

    def backward(grads):
        a.accumulate_grad(_g(grads) * mask)

    record((a,), (out,), backward)
    return out


# ---------------------------------------------------------------------------
# fused blocks
# ---------------------------------------------------------------------------

def lstm_cell(x, h, c, w, b):
    """One LSTM step. Gate layout along the 4H axis: input, forget, cell, out.

    x: (B, Din), h/c: (B, H), w: (Din+H, 4H), b: (4H,). Returns (h', c').
    """
    B, Din = x.shape
    H = h.shape[1]
    if w.shape != (Din + H, 4 * H):
        raise ShapeError(
            f"lstm_cell: weight shape {w.shape} != ({Din + H}, {4 * H})"
        )
    xh = np.concatenate([x.data, h.data], axis=1)
    z = xh @ w.data + b.data
    zi, zf, zg, zo = np.split(z, 4, axis=1)
    with np.errstate(over="ignore"):
        si = 1.0 / (1.0 + np.exp(-zi))
        sf = 1.0 / (1.0 + np.exp(-zf))
        so = 1.0 / (1.0 + np.exp(-zo))
    tg = np.tanh(zg)
    c_new = sf * c.data + si * tg
    tc = np.tanh(c_new)
    h_new = so * tc
    out_h, out_c = Tensor(h_new), Tensor(c_new)
    c_data = c.data

    def backward(grads):
        gh, gc = grads
        if gh is None:
            gh = 0.0
        if gc is None:
            gc = 0.0
        dc_total = gc + gh * so * (1.0 - tc * tc)
        d_o = gh * tc * so * (1.0 - so)
        d_f = dc_total * c_data * sf * (1.0 - sf)
        d_i = dc_total * tg * si * (1.0 - si)
        d_g = dc_total * si * (1.0 - tg * tg)
        dz = np.concatenate([d_i, d_f, d_g, d_o], axis=1)
        if w.requires_grad:
            w.accumulate_grad(xh.T @ dz)
        if b.requires_grad:
            b.accumulate_grad(dz.sum(axis=0))
        dxh = dz @ w.data.T
        if x.requires_grad:
            x.accumulate_grad(dxh[:, :Din])
        if h.requires_grad:
            h.accumulate_grad(dxh[:, Din:])
        if c.requires_grad:
            c.accumulate_grad(dc_total * sf)

    record((x, h, c, w, b), (out_h, out_c), backward)
    return out_h, out_c


def cross_entropy_sum(logits, targets, pad_id=0):
    """Summed token NLL over non-pad positions plus the counts to normalize by.

    Returns (loss_sum, n_tokens, n_utterances). Padded positions contribute
    exactly zero. Raises when every target is padding.
    """
    x = logits.data
    V = x.shape[-1]
    targets = np.asarray(targets)
    if targets.shape != x.shape[:-1]:
        raise ShapeError(
            f"cross_entropy: targets {targets.shape} != logits rows {x.shape[:-1]}"
        )
    valid = targets != pad_id
    n_tokens = int(valid.sum())
    if n_tokens == 0:
        raise ValueError("cross_entropy: all targets are padding (empty supervision)")
    safe = np.where(valid, targets, 0)
    if safe.min() < 0 or safe.max() >= V:
        raise ShapeError(f"cross_entropy: target id out of range [0, {V})")
    m = x.max(axis=-1, keepdims=True)
    z = x - m
    lse = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    logp = np.take_along_axis(z - lse, safe[..., None], axis=-1)[..., 0]
    loss = -(logp * valid).sum()
    out = Tensor(np.asarray(loss, dtype=x.dtype))
    n_utts = int(x.shape[0]) if x.ndim == 3 else 1

    def backward(grads):
        g = _g(grads)
        probs = np.exp(z - lse)
        flat = probs.reshape(-1, V)
        flat[np.arange(flat.shape[0]), safe.reshape(-1)] -= 1.0
        probs *= valid[..., None]
        logits.accumulate_grad(g * probs)

    record((logits,), (out,), backward)
    return out, n_tokens, n_utts


def cross_entropy(logits, targets, normalization="per_token", pad_id=0):
    """Token cross entropy normalized per token or per utterance (batch row)."""
    loss, n_tokens, n_utts = cross_entropy_sum(logits, targets, pad_id=pad_id)
    if normalization == "per_token":
        return scale(loss, 1.0 / n_tokens)
    if normalization == "per_utterance":
        return scale(loss, 1.0 / n_utts)
    raise ValueError(f"cross_entropy: unknown normalization {normalization!r}")


# ---------------------------------------------------------------------------
# spec-surface dispatch
# ---------------------------------------------------------------------------

PRIMITIVES = {
    "matmul": matmul,
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "concat": lambda *ts, axis=0: concat(list(ts), axis=axis),
    "slice": index,
    "transpose": transpose,
    "reshape": reshape,
    "sigmoid": sigmoid,
    "tanh": tanh,
    "relu": relu,
    "softmax": softmax,
    "log_softmax": log_softmax,
    "layer_norm": layer_norm,
    "conv1d": conv1d,
    "conv2d": conv2d,
    "max_pool2d": max_pool2d,
    "embedding_lookup": embedding_lookup,
    "dropout": dropout,
    "lstm_cell": lstm_cell,
    "cross_entropy": cross_entropy,
    "reduce_sum": reduce_sum,
    "reduce_mean": reduce_mean,
    "reverse_padded": reverse_padded,
}


def forward_primitives(op_kind, inputs, attrs=None):
    """Checked dispatch over the primitive table.

    Validates finiteness of all tensor inputs (the fault-signal contract)
    before running the op; model code calls the functions directly.
    """
    if op_kind not in PRIMITIVES:
        raise KeyError(f"unknown op_kind {op_kind!r}; known: {sorted(PRIMITIVES)}")
    for i, t in enumerate(inputs):
        if isinstance(t, Tensor) and not t.is_finite():
            raise NonFiniteError(f"{op_kind}: input {i} contains NaN/Inf")
    return PRIMITIVES[op_kind](*inputs, **(attrs or {}))
