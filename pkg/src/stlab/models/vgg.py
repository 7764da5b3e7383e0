"""VGG-style convolutional speech frontend shared by the larger encoders."""

from __future__ import annotations

import numpy as np

from ..autodiff import ops
from .layers import Conv2dLayer, LayerNorm, ceil_div


class VggFrontend:
    """Two blocks of (conv, relu, conv, relu, pool-2) with layer norm per block.

    Input (B, T, F) -> output (B, ceil(T/4), channels[-1] * ceil(F/4)).
    """

    def __init__(self, ps, rng, name, in_features, channels=(64, 128), kernel=3,
                 component="encoder"):
        self.channels = tuple(channels)
        self.kernel = kernel
        self.blocks = []
        cin = 1
        feat = in_features
        for bi, ch in enumerate(self.channels):
            conv_a = Conv2dLayer(ps, rng, f"{name}.b{bi}.conv_a", cin, ch, kernel, 1,
                                 component)
            conv_b = Conv2dLayer(ps, rng, f"{name}.b{bi}.conv_b", ch, ch, kernel, 1,
                                 component)
            feat = ceil_div(feat, 2)
            norm = LayerNorm(ps, rng, f"{name}.b{bi}.norm", ch * feat, component)
            self.blocks.append((conv_a, conv_b, norm, ch, feat))
            cin = ch
        self.out_dim = self.channels[-1] * feat

    def subsampled_length(self, t):
        for _ in self.blocks:
            t = ceil_div(t, 2)
        return t

    def __call__(self, x):
        """x: Tensor (B, T, F) -> (B, T', out_dim)."""
        B, T, F = x.shape
        x = ops.reshape(x, (B, 1, T, F))
        for conv_a, conv_b, norm, ch, feat in self.blocks:
            x = ops.relu(conv_a(x))
            x = ops.relu(conv_b(x))
            x = ops.max_pool2d(x, kernel=2)
            Bc, C, Tc, Fc = x.shape
            x = ops.transpose(x, (0, 2, 1, 3))
            x = ops.reshape(x, (Bc, Tc, C * Fc))
            x = norm(x)
            x = ops.reshape(x, (Bc, Tc, C, Fc))
            x = ops.transpose(x, (0, 2, 1, 3))
        B2, C2, T2, F2 = x.shape
        x = ops.transpose(x, (0, 2, 1, 3))
        return ops.reshape(x, (B2, T2, C2 * F2))


def vgg_param_count(in_features, channels=(64, 128), kernel=3):
    """Closed-form parameter count of the frontend (mirrors the builder)."""
    total = 0
    cin = 1
    feat = in_features
    for ch in channels:
        total += ch * cin * kernel * kernel + ch
        total += ch * ch * kernel * kernel + ch
        feat = -(-feat // 2)
        total += 2 * ch * feat  # layer norm gain + bias
        cin = ch
    return total


def vgg_out_dim(in_features, channels=(64, 128)):
    feat = in_features
    for _ in channels:
        feat = -(-feat // 2)
    return channels[-1] * feat
