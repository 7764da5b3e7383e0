"""Optimizers, training loop, encoder transfer."""

from .optim import (
    AccumulatedStep,
    Adadelta,
    Adam,
    OptimizerConfig,
    clip_global_norm,
    make_optimizer,
)
from .loop import (
    DivergenceError,
    TrainResult,
    TrainSettings,
    read_metrics,
    steps_to_dev_loss,
    train_model,
)
from .transfer import TransferError, encoder_signature, encoder_signature_from_meta, transfer_encoder

__all__ = [
    "AccumulatedStep",
    "Adadelta",
    "Adam",
    "OptimizerConfig",
    "clip_global_norm",
    "make_optimizer",
    "DivergenceError",
    "TrainResult",
    "TrainSettings",
    "read_metrics",
    "steps_to_dev_loss",
    "train_model",
    "TransferError",
    "encoder_signature",
    "encoder_signature_from_meta",
    "transfer_encoder",
]
