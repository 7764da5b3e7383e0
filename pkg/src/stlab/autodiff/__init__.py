"""Reverse-mode autodiff engine: tensors, primitives, gradcheck, parameters."""

from .tensor import (
    AutodiffError,
    NonFiniteError,
    ShapeError,
    Tensor,
    is_grad_enabled,
    no_grad,
)
from . import ops
from .ops import forward_primitives
from .gradcheck import GradCheckReport, check_gradients, central_difference
from .params import ParameterSet, seeded_rng, uniform_fan_in
from .checkpoint import (
    CheckpointError,
    load_checkpoint,
    restore_parameters,
    save_checkpoint,
)

__all__ = [
    "AutodiffError",
    "NonFiniteError",
    "ShapeError",
    "Tensor",
    "is_grad_enabled",
    "no_grad",
    "ops",
    "forward_primitives",
    "GradCheckReport",
    "check_gradients",
    "central_difference",
    "ParameterSet",
    "seeded_rng",
    "uniform_fan_in",
    "CheckpointError",
    "load_checkpoint",
    "restore_parameters",
    "save_checkpoint",
]
