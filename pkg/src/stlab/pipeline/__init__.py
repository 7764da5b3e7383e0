"""Experiment configuration, phases, and reporting."""

from .config import (
    ConfigError,
    DEFAULTS,
    apply_overrides,
    load_config,
    resolve,
    save_config,
    scope_hash,
)
from .phases import (
    PrerequisiteError,
    cmd_augment,
    cmd_cascade,
    cmd_decode,
    cmd_finetune,
    cmd_prepare,
    cmd_pretrain,
    cmd_score,
    cmd_train,
    cmd_train_asr,
    cmd_train_mt,
    guard_gold_only,
    load_manifests,
    load_subwords,
    phase_dir,
    read_done,
)
from .report import build_report, collect_run, format_table, write_report

__all__ = [
    "ConfigError",
    "DEFAULTS",
    "apply_overrides",
    "load_config",
    "resolve",
    "save_config",
    "scope_hash",
    "PrerequisiteError",
    "cmd_augment",
    "cmd_cascade",
    "cmd_decode",
    "cmd_finetune",
    "cmd_prepare",
    "cmd_pretrain",
    "cmd_score",
    "cmd_train",
    "cmd_train_asr",
    "cmd_train_mt",
    "guard_gold_only",
    "load_manifests",
    "load_subwords",
    "phase_dir",
    "read_done",
    "build_report",
    "collect_run",
    "format_table",
    "write_report",
]
