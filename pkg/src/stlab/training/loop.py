"""Epoch-based training driver with frame batching, delayed updates,
dev-side checkpoint selection and patience stopping.

The metrics log is append-only JSON lines without timestamps so two runs
with identical seeds produce byte-identical logs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from ..autodiff.checkpoint import save_checkpoint
from ..models.layers import clear_dropout_context, set_dropout_context
from .optim import AccumulatedStep, make_optimizer


class DivergenceError(RuntimeError):
    pass


@dataclass
class TrainSettings:
    seed: int = 1
    max_epochs: int = 30
    patience: int = 5
    dev_metric: str = "bleu"   # bleu (higher better) | wer | loss (lower better)
    log_every: int = 1         # steps between loss log lines


@dataclass
class TrainResult:
    best_path: str | None
    best_metric: float | None
    best_step: int
    steps: int
    epochs: int
    log_path: str
    history: list = field(default_factory=list)


def _better(metric, best, kind):
    if best is None:
        return True
    return metric > best if kind == "bleu" else metric < best


def train_model(model, optimizer_cfg, batch_fn, dev_fn, settings, out_dir,
                config_hash="", extra_meta=None):
    """Train until patience or max_epochs; keep the best-dev checkpoint.

    batch_fn(epoch_seed) -> iterable of batches for one epoch.
    dev_fn(model) -> dict with 'loss' plus the dev metric named by settings
    (e.g. 'bleu' or 'wer'); called after every epoch.
    """
    os.makedirs(out_dir, exist_ok=True)
    log_path = os.path.join(out_dir, "metrics.jsonl")
    optimizer = make_optimizer(optimizer_cfg)
    stepper = AccumulatedStep(model.params, optimizer, optimizer_cfg)
    model.params.zero_grads()

    step = 0
    best_metric = None
    best_step = 0
    best_path = None
    bad_epochs = 0
    history = []
    with open(log_path, "w", encoding="utf-8") as log:
        for epoch in range(1, settings.max_epochs + 1):
            for batch in batch_fn((settings.seed, epoch)):
                set_dropout_context(settings.seed, step)
                loss_sum, n_tok, n_utt = model.forward_loss_sum(batch)
                clear_dropout_context()
                if not np.isfinite(loss_sum.data):
                    raise DivergenceError(
                        f"non-finite loss at step {step} (epoch {epoch}); "
                        "lower the learning rate or raise clip_norm"
                    )
                ready = stepper.add_backward(loss_sum, n_tok, n_utt)
                if ready:
                    loss, gnorm = stepper.apply()
                    step += 1
                    if step % settings.log_every == 0:
                        log.write(json.dumps(
                            {"step": step, "epoch": epoch, "loss": loss,
                             "lr": optimizer_cfg.lr, "grad_norm": gnorm}) + "\n")
            if stepper._micro:  # leftover micro-batches at epoch end
                loss, gnorm = stepper.apply()
                step += 1
                log.write(json.dumps(
                    {"step": step, "epoch": epoch, "loss": loss,
                     "lr": optimizer_cfg.lr, "grad_norm": gnorm}) + "\n")

            dev = dev_fn(model)
            metric = dev.get(settings.dev_metric)
            if metric is None:
                raise KeyError(
                    f"dev_fn must report {settings.dev_metric!r}; got {sorted(dev)}"
                )
            improved = _better(metric, best_metric, settings.dev_metric)
            entry = {"epoch": epoch, "step": step, "best": improved}
            entry.update({f"dev_{k}": v for k, v in dev.items()})
            history.append(entry)
            log.write(json.dumps(entry) + "\n")
            log.flush()
            if improved:
                best_metric = metric
                best_step = step
                bad_epochs = 0
                best_path = os.path.join(out_dir, "best.ckpt")
                save_checkpoint(best_path, model.params, step=step,
                                dev_score=metric, config_hash=config_hash,
                                arch=model.arch, extra=extra_meta)
                with open(os.path.join(out_dir, "best.json"), "w") as fh:
                    json.dump({"path": "best.ckpt", "metric": metric,
                               "step": step, "epoch": epoch,
                               "dev_metric": settings.dev_metric}, fh)
            else:
                bad_epochs += 1
                if bad_epochs >= settings.patience:
                    break
    return TrainResult(best_path=best_path, best_metric=best_metric,
                       best_step=best_step, steps=step,
                       epochs=len(history), log_path=log_path, history=history)


def read_metrics(log_path):
    entries = []
    with open(log_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries


def steps_to_dev_loss(log_path, threshold):
    """First step whose epoch-level dev loss is <= threshold, else None."""
    for e in read_metrics(log_path):
        if "dev_loss" in e and e["dev_loss"] <= threshold:
            return e["step"]
    return None
