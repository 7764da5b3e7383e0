"""Optimizers over ParameterSets, gradient clipping, delayed updates."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class OptimizerConfig:
    kind: str = "adam"                 # adam | adadelta
    lr: float = 0.001
    betas: tuple = (0.9, 0.999)
    rho: float = 0.95
    eps: float = 1e-8
    clip_norm: float = 5.0             # 0 disables clipping
    normalization: str = "per_token"   # per_token | per_utterance
    accumulate: int = 1                # micro-batches per optimizer step

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("learning rate must be positive")
        if self.kind not in ("adam", "adadelta"):
            raise ValueError(f"unknown optimizer {self.kind!r}")
        if self.normalization not in ("per_token", "per_utterance"):
            raise ValueError(f"unknown normalization {self.normalization!r}")
        if self.accumulate < 1:
            raise ValueError("accumulate must be >= 1")

    @classmethod
    def for_arch(cls, arch, **overrides):
        """Per-architecture defaults: Adam/per-token for the recurrent
        Bérard model, Adadelta/per-utterance for the rest."""
        if arch == "berard":
            base = dict(kind="adam", lr=0.001, normalization="per_token")
        else:
            base = dict(kind="adadelta", lr=1.0, eps=1e-6,
                        normalization="per_utterance")
        base.update(overrides)
        return cls(**base)


def clip_global_norm(params, max_norm):
    """Scale all gradients so the global L2 norm is at most max_norm."""
    norm = params.grad_norm()
    if max_norm and norm > max_norm:
        factor = max_norm / (norm + 1e-12)
        for _, t in params.items():
            if t.grad is not None:
                t.grad *= factor
    return norm


class Adam:
    def __init__(self, config):
        self.config = config
        self.t = 0
        self.m = {}
        self.v = {}

    def step(self, params):
        cfg = self.config
        b1, b2 = cfg.betas
        self.t += 1
        bc1 = 1.0 - b1 ** self.t
        bc2 = 1.0 - b2 ** self.t
        for name, p in params.items():
            if p.grad is None:
                continue
            g = p.grad
            m = self.m.get(name)
            if m is None:
                m = self.m[name] = np.zeros_like(p.data)
                self.v[name] = np.zeros_like(p.data)
            v = self.v[name]
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            p.data -= cfg.lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.eps)


class Adadelta:
    def __init__(self, config):
        self.config = config
        self.sq_grad = {}
        self.sq_delta = {}

    def step(self, params):
        cfg = self.config
        rho, eps = cfg.rho, cfg.eps
        for name, p in params.items():
            if p.grad is None:
                continue
            g = p.grad
            eg = self.sq_grad.get(name)
            if eg is None:
                eg = self.sq_grad[name] = np.zeros_like(p.data)
                self.sq_delta[name] = np.zeros_like(p.data)
            ed = self.sq_delta[name]
            eg *= rho
            eg += (1.0 - rho) * g * g
            delta = np.sqrt(ed + eps) / np.sqrt(eg + eps) * g
            p.data -= cfg.lr * delta
            ed *= rho
            ed += (1.0 - rho) * delta * delta


def make_optimizer(config):
    return Adam(config) if config.kind == "adam" else Adadelta(config)


@dataclass
class AccumulatedStep:
    """Delayed updates: sum raw gradients and counts over K micro-batches,
    normalize once, then take a single optimizer step. The result matches
    the gradient of the concatenated batch under either normalization."""

    params: object
    optimizer: object
    config: OptimizerConfig
    _count: int = 0
    _loss_sum: float = 0.0
    _micro: int = 0

    def add_backward(self, loss_sum, n_tokens, n_utts):
        loss_sum.backward()
        self._count += n_tokens if self.config.normalization == "per_token" else n_utts
        self._loss_sum += loss_sum.item()
        self._micro += 1
        return self._micro >= self.config.accumulate

    def apply(self):
        """Normalize, clip, step; returns (normalized loss, grad norm)."""
        if self._micro == 0:
            raise RuntimeError("no gradients accumulated")
        scale = 1.0 / self._count
        for _, p in self.params.items():
            if p.grad is not None:
                p.grad *= scale
        norm = clip_global_norm(self.params, self.config.clip_norm)
        self.optimizer.step(self.params)
        loss = self._loss_sum * scale
        self.params.zero_grads()
        self._count = 0
        self._loss_sum = 0.0
        self._micro = 0
        return loss, norm
