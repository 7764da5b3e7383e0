"""Named parameter collections with component labels for encoder transfer."""

from __future__ import annotations

import hashlib

import numpy as np

from .tensor import Tensor

COMPONENTS = ("encoder", "decoder", "attention", "embedding")


def seeded_rng(*key):
    """Deterministic generator from a tuple of non-negative ints."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def uniform_fan_in(rng, shape, fan_in=None, dtype=np.float32):
    """Matrix init: uniform in +-1/sqrt(fan_in); fan_in defaults to shape[0]."""
    fan = fan_in if fan_in is not None else shape[0]
    bound = 1.0 / np.sqrt(max(1, fan))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class ParameterSet:
    """Ordered map name -> trainable Tensor, each tagged with a component."""

    def __init__(self, dtype=np.float32):
        self.dtype = np.dtype(dtype)
        self._params = {}
        self._components = {}

    def add(self, name, value, component):
        if name in self._params:
            raise ValueError(f"duplicate parameter name {name!r}")
        if component not in COMPONENTS:
            raise ValueError(f"component {component!r} not in {COMPONENTS}")
        t = Tensor(np.asarray(value, dtype=self.dtype), requires_grad=True)
        self._params[name] = t
        self._components[name] = component
        return t

    def __getitem__(self, name):
        return self._params[name]

    def __contains__(self, name):
        return name in self._params

    def __iter__(self):
        return iter(self._params)

    def __len__(self):
        return len(self._params)

    def items(self):
        return self._params.items()

    def names(self):
        return list(self._params)

    def component(self, name):
        return self._components[name]

    def by_component(self, component):
        return {n: t for n, t in self._params.items() if self._components[n] == component}

    def total_size(self):
        return sum(t.size for t in self._params.values())

    def zero_grads(self):
        for t in self._params.values():
            t.grad = None

    def grad_norm(self):
        total = 0.0
        for t in self._params.values():
            if t.grad is not None:
                total += float((t.grad.astype(np.float64) ** 2).sum())
        return float(np.sqrt(total))

    def state_arrays(self):
        """name -> data array (the live arrays, not copies)."""
        return {n: t.data for n, t in self._params.items()}

    def load_arrays(self, arrays, only=None):
        """Copy values in by name; shapes must match exactly."""
        for name, arr in arrays.items():
            if only is not None and name not in only:
                continue
            if name not in self._params:
                raise KeyError(f"unknown parameter {name!r}")
            t = self._params[name]
            arr = np.asarray(arr)
            if arr.shape != t.shape:
                raise ValueError(
                    f"shape mismatch for {name!r}: have {t.shape}, loading {arr.shape}"
                )
            t.data = arr.astype(self.dtype, copy=True)

    def component_hash(self, component):
        """SHA-256 over the raw bytes of one component's parameters, in name order."""
        h = hashlib.sha256()
        for name in self._params:
            if self._components[name] == component:
                h.update(name.encode())
                h.update(np.ascontiguousarray(self._params[name].data).tobytes())
        return h.hexdigest()
