"""Experiment configuration: defaults, YAML loading, dotted overrides,
validation, and per-phase scope hashing.

The resolved config is a plain nested dict (schema documented in
docs/config.md); every output artifact embeds the hash of the config scope
that produced it, and a phase refuses to run on prerequisites built from a
different scope hash.
"""

from __future__ import annotations

import copy
import hashlib
import json

import yaml


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "name": "experiment",
    "seed": 1,
    "precision": "float32",
    "corpus": {
        "kind": "toy",
        "seed": 77,
        "sizes": {"gold": 2000, "asr": 8000, "mt": 10000, "dev": 200, "test": 400},
        "paths": {},                      # for kind: files
        "max_utterance_frames": 0,        # 0 = uncapped
    },
    "text": {
        "recipe_src": "toy",
        "recipe_tgt": "toy",
        "subword_mode": "unigram",        # char | unigram
        "vocab_size": 200,
        "contamination_min_words": 2,
    },
    "mt": {
        "profile": "desk",
        "overrides": {},
        "optimizer": {"kind": "adam", "lr": 0.001, "normalization": "per_token",
                      "clip_norm": 5.0, "accumulate": 1},
        "training": {"max_tokens": 3000, "max_epochs": 12, "patience": 4,
                     "dev_metric": "bleu"},
    },
    "asr": {
        "arch": "berard",
        "profile": "desk",
        "overrides": {},
        "optimizer": {"kind": "adam", "lr": 0.001, "normalization": "per_token",
                      "clip_norm": 5.0, "accumulate": 1},
        "training": {"max_frames": 6000, "max_epochs": 12, "patience": 4,
                     "dev_metric": "wer"},
    },
    "pretrain": {
        "corpus": "asr+tts",              # asr | asr+tts
        "optimizer": {"kind": "adam", "lr": 0.001, "normalization": "per_token",
                      "clip_norm": 5.0, "accumulate": 1},
        "training": {"max_frames": 6000, "max_epochs": 10, "patience": 3,
                     "dev_metric": "wer"},
    },
    "model": {
        "arch": "berard",
        "profile": "desk",
        "overrides": {},
    },
    "training": {
        "max_frames": 6000,
        "max_epochs": 20,
        "patience": 5,
        "dev_metric": "bleu",
        "optimizer": {},                  # empty = per-arch defaults
    },
    "finetune": {
        "max_epochs": 8,
        "patience": 3,
        "optimizer": {},
    },
    "augmentation": {
        "steps": [],
        "weights": {},
    },
    "phases": {"augment": False, "pretrain": False, "finetune": False,
               "cascade": False},
    "decode": {"mode": "beam", "width": 5, "alpha": 1.0, "max_len_factor": 1.5,
               "max_len_cap": 200},
    "sweep": None,
}

# Which config sections feed each phase; hashes embed into artifacts.
SCOPES = {
    "prepare": ("corpus", "text"),
    "mt": ("corpus", "text", "mt", "seed", "precision"),
    "asr": ("corpus", "text", "asr", "seed", "precision"),
    "augment": ("corpus", "text", "augmentation", "mt", "seed"),
    "pretrain": ("corpus", "text", "augmentation", "pretrain", "model", "seed",
                 "precision"),
    "train": ("corpus", "text", "augmentation", "model", "training", "phases",
              "pretrain", "seed", "precision"),
    "finetune": ("corpus", "text", "augmentation", "model", "training", "phases",
                 "pretrain", "finetune", "seed", "precision"),
    "decode": ("corpus", "text", "augmentation", "model", "training", "phases",
               "pretrain", "finetune", "decode", "seed", "precision"),
    "cascade": ("corpus", "text", "mt", "asr", "decode", "seed", "precision"),
}


def deep_merge(base, override):
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = deep_merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg, pairs):
    """Dotted-path key=value overrides from the command line."""
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not key=value")
        path, raw = pair.split("=", 1)
        keys = path.split(".")
        node = cfg
        for k in keys[:-1]:
            if not isinstance(node.get(k), dict):
                node[k] = {}
            node = node[k]
        node[keys[-1]] = _parse_value(raw)
    return cfg


def validate(cfg):
    def fail(msg):
        raise ConfigError(msg)

    unknown = set(cfg) - set(DEFAULTS) - {"out_dir"}
    if unknown:
        fail(f"unknown config keys: {sorted(unknown)}")
    if cfg["precision"] not in ("float32", "float64"):
        fail("precision must be float32 or float64")
    corpus = cfg["corpus"]
    if corpus["kind"] not in ("toy", "files"):
        fail(f"corpus.kind must be toy or files, got {corpus['kind']!r}")
    if corpus["kind"] == "toy":
        for k in ("gold", "asr", "mt", "dev", "test"):
            if int(corpus["sizes"].get(k, 0)) < 1:
                fail(f"corpus.sizes.{k} must be >= 1")
    text = cfg["text"]
    if text["subword_mode"] not in ("char", "unigram"):
        fail("text.subword_mode must be char or unigram")
    if cfg["model"]["arch"] not in ("berard", "vgg_lstm", "vgg_transformer"):
        fail(f"model.arch {cfg['model']['arch']!r} is not a speech architecture")
    for section in ("training", "finetune"):
        if int(cfg[section]["max_epochs"]) < 0:
            fail(f"{section}.max_epochs must be >= 0")
    for step in cfg["augmentation"]["steps"]:
        method = step.get("method")
        if method not in ("mt_complete", "tts_complete"):
            fail(f"augmentation step method {method!r} unknown")
        if method == "tts_complete":
            if step.get("engine") not in ("A", "B"):
                fail("tts_complete step needs engine A or B")
            mode = step.get("speakers", {}).get("mode", "round_robin")
            if mode not in ("single", "round_robin"):
                fail(f"speaker policy {mode!r} unknown")
    if cfg["decode"]["mode"] not in ("beam", "greedy"):
        fail("decode.mode must be beam or greedy")
    if int(cfg["decode"]["width"]) < 1:
        fail("decode.width must be >= 1")
    if cfg["pretrain"]["corpus"] not in ("asr", "asr+tts"):
        fail("pretrain.corpus must be asr or asr+tts")
    return cfg


def resolve(raw=None, sets=None, seed=None, out_dir=None):
    cfg = deep_merge(DEFAULTS, raw or {})
    apply_overrides(cfg, sets)
    if seed is not None:
        cfg["seed"] = int(seed)
    if out_dir is not None:
        cfg["out_dir"] = str(out_dir)
    return validate(cfg)


def load_config(path, sets=None, seed=None, out_dir=None):
    with open(path, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: config must be a mapping")
    return resolve(raw, sets=sets, seed=seed, out_dir=out_dir)


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def scope_hash(cfg, scope):
    if scope not in SCOPES:
        raise KeyError(f"unknown scope {scope!r}")
    payload = {k: cfg.get(k) for k in SCOPES[scope]}
    return hashlib.sha256(canonical_json(payload).encode()).hexdigest()[:16]


def save_config(cfg, path):
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=True)
