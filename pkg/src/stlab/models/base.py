"""Shared model-side structures."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..autodiff import ops


@dataclass
class EncoderOutput:
    """Subsampled encoder states with lengths and the validity mask."""

    states: object            # Tensor (B, T', d)
    lengths: np.ndarray       # (B,) valid step counts after subsampling
    mask: np.ndarray          # (B, T') boolean
    precomputed: object = None  # attention-side projection of states


@dataclass
class DecoderState:
    """Per-layer recurrent states plus attention bookkeeping."""

    layers: list                    # [(h, c)] per layer, bottom to top
    outputs: list = field(default_factory=list)  # per-layer outputs of last step
    context: object = None          # last context vector
    attn_weights: object = None     # last attention weights (B, T')


def stack_steps(step_outputs, axis=1):
    """[(B, V)] per step -> (B, L, V)."""
    B = step_outputs[0].shape[0]
    cols = [ops.reshape(o, (B, 1) + o.shape[1:]) for o in step_outputs]
    return ops.concat(cols, axis=axis)
