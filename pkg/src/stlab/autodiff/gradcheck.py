"""Finite-difference verification of reverse-mode gradients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import Tensor, no_grad


@dataclass
class GradCheckReport:
    """Outcome of one check: worst relative error across all coordinates."""

    max_rel_err: float
    tol: float
    per_input: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.max_rel_err <= self.tol

    def __str__(self):
        verdict = "PASS" if self.passed else "FAIL"
        return f"gradcheck {verdict}: max rel err {self.max_rel_err:.3e} (tol {self.tol:.1e})"


def _rel_err(a, n):
    return abs(a - n) / max(1.0, abs(a), abs(n))


def central_difference(f, points, h=1e-5, coords=None):
    """Numerical gradient of scalar f at ``points`` (list of float64 arrays).

    ``coords`` optionally restricts which flat coordinates of each input are
    probed (dict index -> array of flat positions); unprobed entries are NaN.
    """
    grads = []
    with no_grad():
        for i, p in enumerate(points):
            flat = p.reshape(-1)
            sel = range(flat.size) if coords is None else coords.get(i, range(flat.size))
            g = np.full(flat.size, np.nan)
            for j in sel:
                orig = flat[j]
                flat[j] = orig + h
                fp = f(points)
                flat[j] = orig - h
                fm = f(points)
                flat[j] = orig
                g[j] = (fp - fm) / (2.0 * h)
            grads.append(g.reshape(p.shape))
    return grads


def check_gradients(f, points, tol=1e-4, h=1e-5, names=None, max_coords=None, seed=0):
    """Compare reverse-mode gradients of ``f`` against central differences.

    f takes a list of float64 ndarrays wrapped as needed and must return a
    scalar: when handed Tensors it should build the taped graph; when handed
    ndarrays (inside the finite-difference loop) a plain float. Callers pass
    one callable working on both via Tensor/ndarray duck typing, or a
    callable that wraps its inputs itself.

    ``max_coords`` caps probed coordinates per input (seeded choice) so big
    parameter tensors stay affordable; None checks every coordinate.
    """
    points = [np.asarray(p, dtype=np.float64) for p in points]
    tensors = [Tensor(p.copy(), requires_grad=True, dtype=np.float64) for p in points]
    out = f(tensors)
    if out.size != 1:
        raise ValueError("check_gradients: f must be scalar-valued")
    out.backward()
    analytic = [
        t.grad if t.grad is not None else np.zeros_like(t.data) for t in tensors
    ]

    def value_fn(arrs):
        wrapped = [Tensor(a, requires_grad=False, dtype=np.float64) for a in arrs]
        return f(wrapped).item()

    coords = None
    if max_coords is not None:
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed])))
        coords = {}
        for i, p in enumerate(points):
            n = p.size
            if n > max_coords:
                coords[i] = np.sort(rng.choice(n, size=max_coords, replace=False))
            else:
                coords[i] = np.arange(n)
    numeric = central_difference(value_fn, points, h=h, coords=coords)

    worst = 0.0
    per_input = {}
    for i, (a, n) in enumerate(zip(analytic, numeric)):
        probed = ~np.isnan(n)
        errs = [
            _rel_err(float(av), float(nv))
            for av, nv in zip(a[probed].reshape(-1), n[probed].reshape(-1))
        ]
        e = max(errs) if errs else 0.0
        key = names[i] if names else i
        per_input[key] = e
        worst = max(worst, e)
    return GradCheckReport(max_rel_err=worst, tol=tol, per_input=per_input)
