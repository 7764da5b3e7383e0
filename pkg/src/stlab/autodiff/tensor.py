"""Dense tensors with reverse-mode automatic differentiation on top of numpy.

The graph is recorded implicitly: every differentiable operation creates a
``_Node`` holding its parents and a backward closure. Creation order is
topological order, so ``backward`` just replays nodes by descending id.
A graph can be walked backward once; running it again without a fresh
forward pass raises.
"""

from __future__ import annotations

import contextlib

import numpy as np

DEFAULT_DTYPE = np.float32


class AutodiffError(RuntimeError):
    """Misuse of the tape (double backward, non-scalar loss, ...)."""


class ShapeError(ValueError):
    """Operands whose shapes do not conform for the requested op."""


class NonFiniteError(FloatingPointError):
    """NaN or Inf detected in data or gradients."""


_grad_enabled = True
_node_counter = 0


def is_grad_enabled():
    return _grad_enabled


@contextlib.contextmanager
def no_grad():
    """Disable tape recording inside the block (decoding, finite differences)."""
    global _grad_enabled
    prev = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = prev


class _Node:
    """One recorded operation: parents, output refs and a backward closure.

    ``backward`` receives one gradient per output (``None`` for outputs the
    loss never consumed) and accumulates into the parents' ``grad``.
    """

    __slots__ = ("nid", "parents", "outputs", "backward", "consumed")

    def __init__(self, parents, outputs, backward):
        global _node_counter
        _node_counter += 1
        self.nid = _node_counter
        self.parents = parents
        self.outputs = outputs
        self.backward = backward
        self.consumed = False


class Tensor:
    """A dense n-d array that can participate in reverse-mode differentiation."""

    __slots__ = ("data", "grad", "requires_grad", "_node")

    def __init__(self, data, requires_grad=False, dtype=None):
        if isinstance(data, Tensor):
            data = data.data
        arr = np.asarray(data)
        if dtype is not None:
            arr = arr.astype(dtype, copy=False)
        elif not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(DEFAULT_DTYPE)
        if arr.ndim > 1 and not arr.flags["C_CONTIGUOUS"]:
            arr = np.ascontiguousarray(arr)
        self.data = arr
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._node = None

    # -- introspection -------------------------------------------------

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def __repr__(self):
        flag = ", requires_grad=True" if self.requires_grad else ""
        return f"Tensor(shape={self.shape}, dtype={self.data.dtype}{flag})"

    def item(self):
        return float(self.data.reshape(()))

    def numpy(self):
        return self.data

    def detach(self):
        return Tensor(self.data, requires_grad=False)

    def is_finite(self):
        return bool(np.isfinite(self.data).all())

    def assert_finite(self, what="tensor"):
        if not self.is_finite():
            raise NonFiniteError(f"non-finite values in {what} (shape {self.shape})")
        if self.grad is not None and not np.isfinite(self.grad).all():
            raise NonFiniteError(f"non-finite values in grad of {what}")

    def zero_grad(self):
        self.grad = None

    # -- autodiff ------------------------------------------------------

    def accumulate_grad(self, g):
        if self.grad is None:
            self.grad = np.array(g, dtype=self.data.dtype, copy=True)
        else:
            self.grad += g

    def backward(self):
        """Populate ``grad`` on every reachable tensor with requires_grad."""
        if self.size != 1:
            raise AutodiffError(f"backward needs a scalar loss, got shape {self.shape}")
        if self._node is None:
            if not self.requires_grad:
                raise AutodiffError("loss does not require grad; nothing was recorded")
            self.grad = np.ones_like(self.data)
            return
        if self._node.consumed:
            raise AutodiffError(
                "backward already ran on this graph; run a fresh forward pass first"
            )
        nodes = []
        seen = set()
        stack = [self._node]
        while stack:
            node = stack.pop()
            if node.nid in seen:
                continue
            seen.add(node.nid)
            nodes.append(node)
            for p in node.parents:
                if p._node is not None and not p._node.consumed:
                    stack.append(p._node)
        nodes.sort(key=lambda n: n.nid, reverse=True)
        self.grad = np.ones_like(self.data)
        for node in nodes:
            grads = [o.grad for o in node.outputs]
            node.backward(grads)
            node.consumed = True
            node.backward = None
            node.parents = ()
            node.outputs = ()

    # -- operator sugar (implementations live in ops.py) ----------------

    def __add__(self, other):
        from . import ops
        return ops.add(self, _wrap(other, self.dtype))

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, _wrap(other, self.dtype))

    def __rsub__(self, other):
        from . import ops
        return ops.sub(_wrap(other, self.dtype), self)

    def __mul__(self, other):
        from . import ops
        if isinstance(other, (int, float)):
            return ops.scale(self, float(other))
        return ops.mul(self, _wrap(other, self.dtype))

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops
        if isinstance(other, (int, float)):
            return ops.scale(self, 1.0 / float(other))
        return ops.div(self, _wrap(other, self.dtype))

    def __neg__(self):
        from . import ops
        return ops.scale(self, -1.0)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, _wrap(other, self.dtype))

    def __getitem__(self, idx):
        from . import ops
        return ops.index(self, idx)

    def sum(self, axis=None, keepdims=False):
        from . import ops
        return ops.reduce_sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims=False):
        from . import ops
        return ops.reduce_mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        from . import ops
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return ops.reshape(self, shape)

    def transpose(self, *axes):
        from . import ops
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return ops.transpose(self, axes or None)


def _wrap(x, dtype):
    if isinstance(x, Tensor):
        return x
    return Tensor(np.asarray(x, dtype=dtype))


def record(parents, outputs, backward):
    """Attach a backward closure if recording is on and any parent needs grad.

    Returns True when the node was recorded.
    """
    if not _grad_enabled:
        return False
    if not any(p.requires_grad for p in parents):
        return False
    node = _Node(tuple(parents), tuple(outputs), backward)
    for out in outputs:
        out.requires_grad = True
        out._node = node
    return True
