"""The experiment phases behind the CLI subcommands.

Each phase writes its artifacts plus a DONE.json carrying the scope hash of
the config sections it depends on. Re-running with the same hash is a no-op;
a prerequisite built under a different hash aborts before any compute.
"""

from __future__ import annotations

import json
import os
import shutil

import numpy as np

from ..augment.complete import SpeakerPolicy, mix, mt_complete, tts_complete
from ..autodiff import no_grad
from ..autodiff.checkpoint import load_checkpoint, restore_parameters, save_checkpoint
from ..corpus.batching import iter_frame_batches, iter_text_batches
from ..corpus.filtering import contamination_filter
from ..corpus.records import Manifest, corpus_stats, stats_table
from ..corpus.speech import SpeechResolver
from ..corpus.toy import ToySizes, toy_engine, toy_task
from ..evaluate.cascade import cascade_translate, oracle_bleu, translate_texts
from ..evaluate.decoding import DecodeConfig, decode_in_chunks
from ..evaluate.metrics import bleu, wer
from ..models import build_model, make_config
from ..text.normalize import normalize
from ..text.subword import EOS_ID, SubwordModel, train_subword
from ..training.loop import TrainSettings, train_model
from ..training.optim import OptimizerConfig
from ..training.transfer import transfer_encoder
from .config import scope_hash


class PrerequisiteError(RuntimeError):
    pass


PHASE_DIRS = {
    "prepare": "data",
    "mt": "mt",
    "asr": "asr",
    "pretrain": "pretrain",
    "augment": "augment",
    "train": "train",
    "finetune": "finetune",
    "decode": "decode",
    "score": "score",
    "cascade": "cascade",
}


def phase_dir(run_dir, phase):
    return os.path.join(run_dir, PHASE_DIRS[phase])


def _done_path(run_dir, phase):
    return os.path.join(phase_dir(run_dir, phase), "DONE.json")


def read_done(run_dir, phase):
    path = _done_path(run_dir, phase)
    if not os.path.exists(path):
        return None
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def write_done(run_dir, phase, config_hash, summary=None):
    payload = {"phase": phase, "config_hash": config_hash, "summary": summary or {}}
    with open(_done_path(run_dir, phase), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
    return payload


def require_phase(cfg, run_dir, phase, needed_by):
    """Prerequisite gate: missing -> actionable error; stale -> abort."""
    done = read_done(run_dir, phase)
    if done is None:
        raise PrerequisiteError(
            f"{needed_by} needs the {phase} phase; run `stlab {phase}` first"
        )
    expected = scope_hash(cfg, phase)
    if done["config_hash"] != expected:
        raise PrerequisiteError(
            f"{needed_by}: {phase} artifacts were built with config hash "
            f"{done['config_hash']}, current is {expected}; re-run `stlab {phase}`"
        )
    return done


def up_to_date(cfg, run_dir, phase):
    done = read_done(run_dir, phase)
    return done is not None and done["config_hash"] == scope_hash(cfg, phase)


# ---------------------------------------------------------------------------
# prepare
# ---------------------------------------------------------------------------

MANIFEST_NAMES = ("gold", "asr", "mt", "dev", "test")


def _normalize_manifest(manifest, recipe_src, recipe_tgt):
    records = []
    for r in manifest:
        records.append(r.with_fields(
            transcript=None if r.transcript is None else normalize(r.transcript, recipe_src),
            translation=None if r.translation is None else normalize(r.translation, recipe_tgt),
        ))
    return Manifest(name=manifest.name, split=manifest.split, records=records)


def load_manifests(cfg, run_dir):
    data = phase_dir(run_dir, "prepare")
    out = {}
    for name in MANIFEST_NAMES:
        split = "train" if name in ("gold", "asr", "mt") else name
        out[name] = Manifest.load(os.path.join(data, f"{name}.jsonl"),
                                  name=name, split=split)
    return out


def load_subwords(run_dir):
    data = phase_dir(run_dir, "prepare")
    return (SubwordModel.load(os.path.join(data, "src.subword")),
            SubwordModel.load(os.path.join(data, "tgt.subword")))


def cmd_prepare(cfg, run_dir):
    phase = "prepare"
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    data = phase_dir(run_dir, phase)
    os.makedirs(data, exist_ok=True)
    corpus_cfg = cfg["corpus"]
    if corpus_cfg["kind"] == "toy":
        sizes = ToySizes(**{k: int(v) for k, v in corpus_cfg["sizes"].items()})
        manifests = toy_task(int(corpus_cfg["seed"]), sizes)
    else:
        paths = corpus_cfg["paths"]
        missing = [n for n in MANIFEST_NAMES if n not in paths]
        if missing:
            raise PrerequisiteError(
                f"corpus.kind=files needs paths for {missing}; see docs/formats.md "
                "for the manifest schema (real Librispeech/MuST-C/WMT import is "
                "out of scope; docs/import_adapter.md documents the mapping)"
            )
        manifests = {
            n: Manifest.load(paths[n], name=n,
                             split="train" if n in ("gold", "asr", "mt") else n)
            for n in MANIFEST_NAMES
        }
    recipe_src = cfg["text"]["recipe_src"]
    recipe_tgt = cfg["text"]["recipe_tgt"]
    manifests = {n: _normalize_manifest(m, recipe_src, recipe_tgt)
                 for n, m in manifests.items()}

    held = [manifests["dev"], manifests["test"]]
    min_words = int(cfg["text"]["contamination_min_words"])
    reports = {}
    for name in ("gold", "asr", "mt"):
        manifests[name], reports[name] = contamination_filter(
            manifests[name], held, min_words=min_words)
    with open(os.path.join(data, "contamination.json"), "w") as fh:
        json.dump(reports, fh, indent=1, sort_keys=True)

    src_corpus = [r.transcript for n in ("gold", "asr", "mt")
                  for r in manifests[n] if r.transcript]
    tgt_corpus = [r.translation for n in ("gold", "mt")
                  for r in manifests[n] if r.translation]
    mode = cfg["text"]["subword_mode"]
    vocab_size = int(cfg["text"]["vocab_size"])
    src_model = train_subword(src_corpus, mode=mode, vocab_size=vocab_size)
    tgt_model = train_subword(tgt_corpus, mode=mode, vocab_size=vocab_size)
    src_model.save(os.path.join(data, "src.subword"))
    tgt_model.save(os.path.join(data, "tgt.subword"))

    resolver = SpeechResolver()
    stats = []
    for name in MANIFEST_NAMES:
        manifests[name].save(os.path.join(data, f"{name}.jsonl"))
        stats.append(corpus_stats(manifests[name], resolver))
    with open(os.path.join(data, "stats.json"), "w") as fh:
        json.dump(stats, fh, indent=1, sort_keys=True)
    with open(os.path.join(data, "stats.txt"), "w") as fh:
        fh.write(stats_table(stats) + "\n")

    summary = {
        "removed": {n: reports[n]["removed"] for n in reports},
        "src_vocab": src_model.vocab_size,
        "tgt_vocab": tgt_model.vocab_size,
        "sizes": {n: len(manifests[n]) for n in MANIFEST_NAMES},
    }
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


# ---------------------------------------------------------------------------
# shared training helpers
# ---------------------------------------------------------------------------

class _Encoder:
    """Per-record target/source id cache."""

    def __init__(self, subword, fieldname):
        self.subword = subword
        self.fieldname = fieldname
        self.cache = {}

    def __call__(self, record):
        ids = self.cache.get(record.id)
        if ids is None:
            text = getattr(record, self.fieldname)
            ids = self.subword.encode(text)
            self.cache[record.id] = ids
        return ids


def _dev_loss_frames(model, records, resolver, target_fn, max_frames):
    total, tokens = 0.0, 0
    with no_grad():
        for batch in iter_frame_batches(records, resolver, target_fn, max_frames, 0):
            loss_sum, n_tok, _ = model.forward_loss_sum(batch)
            total += loss_sum.item()
            tokens += n_tok
    return total / max(tokens, 1)


def _dev_loss_text(model, records, source_fn, target_fn, max_tokens):
    total, tokens = 0.0, 0
    with no_grad():
        for batch in iter_text_batches(records, source_fn, target_fn, max_tokens, 0):
            loss_sum, n_tok, _ = model.forward_loss_sum(batch)
            total += loss_sum.item()
            tokens += n_tok
    return total / max(tokens, 1)


_DEV_DECODE = DecodeConfig(mode="greedy", max_len_factor=2.0)


def _decode_speech_texts(model, records, resolver, subword, cfg=_DEV_DECODE):
    ordered = sorted(records, key=lambda r: r.id)
    feats = [resolver.frames(r) for r in ordered]
    ids = decode_in_chunks(model, feats, None, cfg)
    return ordered, [subword.decode(x) for x in ids]


def _speech_dev_fn(model, records, resolver, target_fn, max_frames, subword, metric,
                   ref_field):
    def dev_fn(m):
        out = {"loss": _dev_loss_frames(m, records, resolver, target_fn, max_frames)}
        ordered, hyps = _decode_speech_texts(m, records, resolver, subword)
        refs = [getattr(r, ref_field) for r in ordered]
        if metric == "bleu":
            out["bleu"] = bleu(hyps, refs, smooth=True).bleu
        else:
            out["wer"] = wer(hyps, refs).wer
        return out
    return dev_fn


def _text_dev_fn(model, records, source_fn, target_fn, max_tokens, tgt_subword):
    def dev_fn(m):
        out = {"loss": _dev_loss_text(m, records, source_fn, target_fn, max_tokens)}
        ordered = sorted(records, key=lambda r: r.id)
        srcs = [source_fn(r) + [EOS_ID] for r in ordered]
        hyp_ids = decode_in_chunks(m, srcs, None, _DEV_DECODE)
        hyps = [tgt_subword.decode(x) for x in hyp_ids]
        refs = [r.translation for r in ordered]
        out["bleu"] = bleu(hyps, refs, smooth=True).bleu
        return out
    return dev_fn


def _optimizer_config(section, arch):
    opts = dict(section or {})
    if not opts:
        return OptimizerConfig.for_arch(arch)
    kind = opts.pop("kind", None)
    if kind is None:
        return OptimizerConfig.for_arch(arch, **opts)
    if "betas" in opts:
        opts["betas"] = tuple(opts["betas"])
    return OptimizerConfig(kind=kind, **opts)


def _dtype(cfg):
    return np.float64 if cfg["precision"] == "float64" else np.float32


def _build_speech_model(cfg, section, vocab, seed):
    arch = section.get("arch", cfg["model"]["arch"])
    profile = section.get("profile", cfg["model"]["profile"])
    overrides = section.get("overrides", cfg["model"].get("overrides", {}))
    model_cfg = make_config(arch, profile, vocab=vocab, overrides=overrides)
    return build_model(arch, model_cfg, seed=seed, dtype=_dtype(cfg))


def _train_speech(cfg, run_dir, phase, records, dev_records, *, target_field,
                  dev_metric, section, model, subword, config_hash, extra_meta=None):
    out_dir = phase_dir(run_dir, phase)
    resolver = SpeechResolver()
    target_fn = _Encoder(subword, target_field)
    tr = section["training"]
    max_frames = int(tr.get("max_frames", cfg["training"]["max_frames"]))
    cap = int(cfg["corpus"].get("max_utterance_frames", 0))
    if cap:
        records = [r for r in records if resolver.num_frames(r) <= cap]

    def batch_fn(epoch_seed):
        resolver.prefetch(records)
        return iter_frame_batches(records, resolver, target_fn, max_frames, epoch_seed)

    dev_fn = _speech_dev_fn(model, dev_records, resolver, target_fn, max_frames,
                            subword, dev_metric,
                            "transcript" if target_field == "transcript" else "translation")
    settings = TrainSettings(seed=int(cfg["seed"]), max_epochs=int(tr["max_epochs"]),
                             patience=int(tr["patience"]), dev_metric=dev_metric)
    opt = _optimizer_config(section.get("optimizer"), model.arch)
    return train_model(model, opt, batch_fn, dev_fn, settings, out_dir,
                       config_hash=config_hash, extra_meta=extra_meta)


# ---------------------------------------------------------------------------
# component phases
# ---------------------------------------------------------------------------

def cmd_train_mt(cfg, run_dir):
    phase = "mt"
    require_phase(cfg, run_dir, "prepare", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    manifests = load_manifests(cfg, run_dir)
    src_sub, tgt_sub = load_subwords(run_dir)
    section = cfg["mt"]
    model_cfg = make_config("transformer_text", section["profile"],
                            src_vocab=src_sub.vocab_size, tgt_vocab=tgt_sub.vocab_size,
                            overrides=section.get("overrides", {}))
    model = build_model("transformer_text", model_cfg, seed=int(cfg["seed"]),
                        dtype=_dtype(cfg))
    source_fn = _Encoder(src_sub, "transcript")
    target_fn = _Encoder(tgt_sub, "translation")
    records = list(manifests["mt"])
    tr = section["training"]
    max_tokens = int(tr["max_tokens"])

    def batch_fn(epoch_seed):
        return iter_text_batches(records, source_fn, target_fn, max_tokens, epoch_seed)

    dev_fn = _text_dev_fn(model, list(manifests["dev"]), source_fn, target_fn,
                          max_tokens, tgt_sub)
    settings = TrainSettings(seed=int(cfg["seed"]), max_epochs=int(tr["max_epochs"]),
                             patience=int(tr["patience"]), dev_metric="bleu")
    opt = _optimizer_config(section.get("optimizer"), "transformer_text")
    result = train_model(model, opt, batch_fn, dev_fn, settings,
                         phase_dir(run_dir, phase),
                         config_hash=scope_hash(cfg, phase))
    summary = {"best_bleu": result.best_metric, "steps": result.steps,
               "epochs": result.epochs}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


def cmd_train_asr(cfg, run_dir):
    phase = "asr"
    require_phase(cfg, run_dir, "prepare", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    manifests = load_manifests(cfg, run_dir)
    src_sub, _ = load_subwords(run_dir)
    model = _build_speech_model(cfg, cfg["asr"], src_sub.vocab_size, int(cfg["seed"]))
    result = _train_speech(cfg, run_dir, phase, list(manifests["asr"]),
                           list(manifests["dev"]), target_field="transcript",
                           dev_metric="wer", section=cfg["asr"], model=model,
                           subword=src_sub, config_hash=scope_hash(cfg, phase))
    summary = {"best_wer": result.best_metric, "steps": result.steps,
               "epochs": result.epochs}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


def _tts_step_config(cfg):
    for step in cfg["augmentation"]["steps"]:
        if step.get("method") == "tts_complete":
            return step
    return {"method": "tts_complete", "source": "mt", "engine": "A",
            "subsample": None, "seed": 13, "speakers": {"mode": "round_robin"}}


def _run_tts_step(cfg, step, manifests):
    engine = toy_engine(int(cfg["corpus"]["seed"]), step.get("engine", "A"))
    speakers = step.get("speakers", {})
    policy = SpeakerPolicy(mode=speakers.get("mode", "round_robin"),
                           speaker=int(speakers.get("speaker", 0)),
                           roster_size=speakers.get("roster_size"))
    sub = step.get("subsample")
    return tts_complete(
        manifests[step.get("source", "mt")], engine, policy,
        subsample=None if sub in (None, 0) else int(sub),
        seed=int(step.get("seed", 13)),
        from_translation=bool(step.get("from_translation", False)),
    )


def cmd_pretrain(cfg, run_dir):
    phase = "pretrain"
    require_phase(cfg, run_dir, "prepare", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    manifests = load_manifests(cfg, run_dir)
    src_sub, _ = load_subwords(run_dir)
    section = cfg["pretrain"]
    pieces = [("asr", manifests["asr"])]
    if section["corpus"] == "asr+tts":
        tts_manifest, _ = _run_tts_step(cfg, _tts_step_config(cfg), manifests)
        pieces.append(("tts", tts_manifest))
    corpus = mix(pieces, name="pretrain-corpus")
    model = _build_speech_model(cfg, {**cfg["model"], **section}, src_sub.vocab_size,
                                int(cfg["seed"]))
    result = _train_speech(cfg, run_dir, phase, list(corpus), list(manifests["dev"]),
                           target_field="transcript", dev_metric="wer",
                           section=section, model=model, subword=src_sub,
                           config_hash=scope_hash(cfg, phase))
    summary = {"best_wer": result.best_metric, "steps": result.steps,
               "corpus": section["corpus"], "size": len(corpus)}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


def cmd_augment(cfg, run_dir):
    phase = "augment"
    require_phase(cfg, run_dir, "prepare", phase)
    steps = cfg["augmentation"]["steps"]
    needs_mt = any(s.get("method") == "mt_complete" for s in steps)
    if needs_mt:
        require_phase(cfg, run_dir, "mt", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    out_dir = phase_dir(run_dir, phase)
    os.makedirs(out_dir, exist_ok=True)
    manifests = load_manifests(cfg, run_dir)
    reports = []
    pieces = [("gold", manifests["gold"])]
    for step in steps:
        if step["method"] == "mt_complete":
            translate = _mt_translator(cfg, run_dir)
            completed, report = mt_complete(manifests[step.get("source", "asr")],
                                            translate)
            pieces.append(("mtsyn", completed))
        else:
            completed, report = _run_tts_step(cfg, step, manifests)
            pieces.append(("ttssyn", completed))
        reports.append(report)
    mixed = mix(pieces, weights=cfg["augmentation"].get("weights", {}),
                name="augmented-train")
    mixed.save(os.path.join(out_dir, "train.jsonl"))
    provenance = {"origins": mixed.origin_histogram(), "steps": reports}
    with open(os.path.join(out_dir, "provenance.json"), "w") as fh:
        json.dump(provenance, fh, indent=1, sort_keys=True)
    summary = {"size": len(mixed), "origins": mixed.origin_histogram()}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


def _mt_translator(cfg, run_dir, width=None):
    """Batch translate_fn backed by the trained MT checkpoint."""
    src_sub, tgt_sub = load_subwords(run_dir)
    meta, arrays = load_checkpoint(os.path.join(phase_dir(run_dir, "mt"), "best.ckpt"),
                                   expect_arch="transformer_text")
    section = cfg["mt"]
    model_cfg = make_config("transformer_text", section["profile"],
                            src_vocab=src_sub.vocab_size, tgt_vocab=tgt_sub.vocab_size,
                            overrides=section.get("overrides", {}))
    model = build_model("transformer_text", model_cfg, seed=0, dtype=_dtype(cfg))
    model.params.load_arrays(arrays)
    dc = cfg["decode"]
    decode_cfg = DecodeConfig(mode=dc["mode"], width=int(width or dc["width"]),
                              alpha=float(dc["alpha"]),
                              max_len_factor=float(dc["max_len_factor"]),
                              max_len_cap=int(dc["max_len_cap"]))

    def translate(texts):
        return translate_texts(model, texts, src_sub, tgt_sub, decode_cfg)

    return translate


def _load_speech_model(cfg, run_dir, phase, section, vocab):
    path = os.path.join(phase_dir(run_dir, phase), "best.ckpt")
    arch = section.get("arch", cfg["model"]["arch"])
    meta, arrays = load_checkpoint(path, expect_arch=arch)
    model = _build_speech_model(cfg, section, vocab, seed=0)
    model.params.load_arrays(arrays)
    return model, meta


def cmd_train(cfg, run_dir):
    phase = "train"
    require_phase(cfg, run_dir, "prepare", phase)
    if cfg["phases"]["augment"]:
        require_phase(cfg, run_dir, "augment", phase)
    if cfg["phases"]["pretrain"]:
        require_phase(cfg, run_dir, "pretrain", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    manifests = load_manifests(cfg, run_dir)
    _, tgt_sub = load_subwords(run_dir)
    if cfg["phases"]["augment"]:
        train_manifest = Manifest.load(
            os.path.join(phase_dir(run_dir, "augment"), "train.jsonl"),
            name="augmented-train", split="train")
    else:
        train_manifest = manifests["gold"]
    model = _build_speech_model(cfg, cfg["model"], tgt_sub.vocab_size, int(cfg["seed"]))
    extra_meta = {}
    if cfg["phases"]["pretrain"]:
        meta, arrays = load_checkpoint(
            os.path.join(phase_dir(run_dir, "pretrain"), "best.ckpt"))
        src_params = restore_parameters(meta, arrays, dtype=model.params.dtype)
        copied = transfer_encoder(meta, arrays, model)
        transfer_report = {
            "copied": len(copied),
            "encoder_hash_source": src_params.component_hash("encoder"),
            "encoder_hash_target": model.params.component_hash("encoder"),
        }
        with open(os.path.join(_ensure_dir(run_dir, phase), "transfer.json"), "w") as fh:
            json.dump(transfer_report, fh, indent=1)
        extra_meta["pretrained_encoder"] = transfer_report["encoder_hash_source"]
    result = _train_speech(cfg, run_dir, phase, list(train_manifest),
                           list(manifests["dev"]), target_field="translation",
                           dev_metric=cfg["training"]["dev_metric"],
                           section={"training": cfg["training"],
                                    "optimizer": cfg["training"].get("optimizer", {})},
                           model=model, subword=tgt_sub,
                           config_hash=scope_hash(cfg, phase), extra_meta=extra_meta)
    summary = {"best": result.best_metric, "steps": result.steps,
               "epochs": result.epochs, "train_size": len(train_manifest)}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


def _ensure_dir(run_dir, phase):
    d = phase_dir(run_dir, phase)
    os.makedirs(d, exist_ok=True)
    return d


def guard_gold_only(manifest):
    bad = [r.id for r in manifest if r.origin != "gold"]
    if bad:
        raise ValueError(
            f"fine-tuning data must be gold-origin only; found synthetic records "
            f"such as {bad[:3]}"
        )


def cmd_finetune(cfg, run_dir):
    phase = "finetune"
    require_phase(cfg, run_dir, "train", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    out_dir = _ensure_dir(run_dir, phase)
    manifests = load_manifests(cfg, run_dir)
    _, tgt_sub = load_subwords(run_dir)
    gold = manifests["gold"]
    guard_gold_only(gold)
    section = cfg["finetune"]
    if int(section["max_epochs"]) == 0:
        src = os.path.join(phase_dir(run_dir, "train"), "best.ckpt")
        shutil.copyfile(src, os.path.join(out_dir, "best.ckpt"))
        shutil.copyfile(os.path.join(phase_dir(run_dir, "train"), "best.json"),
                        os.path.join(out_dir, "best.json"))
        summary = {"status": "zero-epoch copy"}
        write_done(run_dir, phase, scope_hash(cfg, phase), summary)
        return summary
    model, meta = _load_speech_model(cfg, run_dir, "train", cfg["model"],
                                     tgt_sub.vocab_size)
    # fresh optimizer moments; training continues on gold data only
    result = _train_speech(
        cfg, run_dir, phase, list(gold), list(manifests["dev"]),
        target_field="translation", dev_metric=cfg["training"]["dev_metric"],
        section={"training": {**cfg["training"], "max_epochs": section["max_epochs"],
                              "patience": section["patience"]},
                 "optimizer": section.get("optimizer") or cfg["training"].get("optimizer", {})},
        model=model, subword=tgt_sub, config_hash=scope_hash(cfg, phase),
        extra_meta={"finetuned_from": meta["config_hash"]})
    if result.best_path is None:
        # no epoch improved on the dev metric; keep the input checkpoint
        shutil.copyfile(os.path.join(phase_dir(run_dir, "train"), "best.ckpt"),
                        os.path.join(out_dir, "best.ckpt"))
    summary = {"best": result.best_metric, "steps": result.steps}
    write_done(run_dir, phase, scope_hash(cfg, phase), summary)
    return summary


# ---------------------------------------------------------------------------
# decode / score / cascade
# ---------------------------------------------------------------------------

def _decode_cfg(cfg):
    dc = cfg["decode"]
    return DecodeConfig(mode=dc["mode"], width=int(dc["width"]), alpha=float(dc["alpha"]),
                        max_len_factor=float(dc["max_len_factor"]),
                        max_len_cap=int(dc["max_len_cap"]))


def model_phase_for_decode(cfg):
    return "finetune" if cfg["phases"]["finetune"] else "train"


def cmd_decode(cfg, run_dir, split="test"):
    phase = "decode"
    source_phase = model_phase_for_decode(cfg)
    require_phase(cfg, run_dir, source_phase, phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    out_dir = _ensure_dir(run_dir, phase)
    manifests = load_manifests(cfg, run_dir)
    _, tgt_sub = load_subwords(run_dir)
    model, _ = _load_speech_model(cfg, run_dir, source_phase, cfg["model"],
                                  tgt_sub.vocab_size)
    resolver = SpeechResolver()
    records = sorted(manifests[split], key=lambda r: r.id)
    feats = [resolver.frames(r) for r in records]
    hyp_ids = decode_in_chunks(model, feats, None, _decode_cfg(cfg))
    hyps = [tgt_sub.decode(ids) for ids in hyp_ids]
    with open(os.path.join(out_dir, f"{split}.hyp"), "w", encoding="utf-8") as fh:
        fh.write("".join(h + "\n" for h in hyps))
    with open(os.path.join(out_dir, f"{split}.ids"), "w", encoding="utf-8") as fh:
        fh.write("".join(r.id + "\n" for r in records))
    summary = {"split": split, "utterances": len(records), "model": source_phase}
    write_done(run_dir, phase, scope_hash(cfg, "decode"), summary)
    return summary


def cmd_score(cfg, run_dir, split="test"):
    phase = "score"
    require_phase(cfg, run_dir, "decode", phase)
    out_dir = _ensure_dir(run_dir, phase)
    manifests = load_manifests(cfg, run_dir)
    hyp_path = os.path.join(phase_dir(run_dir, "decode"), f"{split}.hyp")
    if not os.path.exists(hyp_path):
        raise PrerequisiteError(f"no hypotheses for split {split}; run `stlab decode`")
    with open(hyp_path, encoding="utf-8") as fh:
        hyps = [line.rstrip("\n") for line in fh]
    records = sorted(manifests[split], key=lambda r: r.id)
    refs = [r.translation for r in records]
    report = bleu(hyps, refs, recipe=cfg["text"]["recipe_tgt"])
    report.wer = wer(hyps, refs).wer
    with open(os.path.join(out_dir, f"{split}.json"), "w") as fh:
        json.dump(report.to_json(), fh, indent=1, sort_keys=True)
    with open(os.path.join(out_dir, f"{split}.txt"), "w") as fh:
        fh.write(report.table() + "\n")
    summary = {"bleu": report.bleu, "wer": report.wer, "split": split}
    write_done(run_dir, phase, scope_hash(cfg, "decode"), summary)
    return summary


def cmd_cascade(cfg, run_dir, split="test"):
    phase = "cascade"
    require_phase(cfg, run_dir, "asr", phase)
    require_phase(cfg, run_dir, "mt", phase)
    if up_to_date(cfg, run_dir, phase):
        return {"status": "up-to-date"}
    out_dir = _ensure_dir(run_dir, phase)
    manifests = load_manifests(cfg, run_dir)
    src_sub, tgt_sub = load_subwords(run_dir)
    asr_model, _ = _load_speech_model(cfg, run_dir, "asr", cfg["asr"],
                                      src_sub.vocab_size)
    meta, arrays = load_checkpoint(os.path.join(phase_dir(run_dir, "mt"), "best.ckpt"),
                                   expect_arch="transformer_text")
    section = cfg["mt"]
    mt_cfg = make_config("transformer_text", section["profile"],
                         src_vocab=src_sub.vocab_size, tgt_vocab=tgt_sub.vocab_size,
                         overrides=section.get("overrides", {}))
    mt_model = build_model("transformer_text", mt_cfg, seed=0, dtype=_dtype(cfg))
    mt_model.params.load_arrays(arrays)

    resolver = SpeechResolver()
    records = sorted(manifests[split], key=lambda r: r.id)
    feats = [resolver.frames(r) for r in records]
    dcfg = _decode_cfg(cfg)
    translations, transcripts = cascade_translate(
        asr_model, mt_model, feats, asr_subword=src_sub, mt_src_subword=src_sub,
        mt_tgt_subword=tgt_sub, recipe=cfg["text"]["recipe_src"], asr_cfg=dcfg,
        mt_cfg=dcfg)
    refs = [r.translation for r in records]
    gold_transcripts = [r.transcript for r in records]
    cascade_report = bleu(translations, refs, recipe=cfg["text"]["recipe_tgt"])
    asr_wer = wer(transcripts, gold_transcripts).wer
    oracle_report, _ = oracle_bleu(mt_model, gold_transcripts, refs,
                                   mt_src_subword=src_sub, mt_tgt_subword=tgt_sub,
                                   recipe=cfg["text"]["recipe_src"], mt_cfg=dcfg)
    payload = {
        "split": split,
        "cascade_bleu": cascade_report.bleu,
        "oracle_bleu": oracle_report.bleu,
        "asr_wer": asr_wer,
        "utterances": len(records),
    }
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
    with open(os.path.join(out_dir, f"{split}.hyp"), "w", encoding="utf-8") as fh:
        fh.write("".join(h + "\n" for h in translations))
    write_done(run_dir, phase, scope_hash(cfg, phase), payload)
    return payload
