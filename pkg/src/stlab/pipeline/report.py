"""Comparison tables across completed runs, plus the TTS sweep curve file."""

from __future__ import annotations

import csv
import json
import os

import yaml

from .phases import phase_dir, read_done


def _load_json(path):
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    return None


def data_label(cfg):
    steps = cfg.get("augmentation", {}).get("steps", [])
    if not cfg.get("phases", {}).get("augment"):
        return "AST"
    label = "AST"
    if any(s.get("method") == "mt_complete" for s in steps):
        label += " + MT"
    if any(s.get("method") == "tts_complete" for s in steps):
        label += " + TTS"
    return label


def model_label(cfg):
    label = cfg.get("model", {}).get("arch", "?")
    if cfg.get("phases", {}).get("pretrain"):
        label += " + pretraining"
    if cfg.get("phases", {}).get("finetune"):
        label += " + fine-tuning"
    return label


def collect_run(run_dir):
    """One row of the comparison table from a run directory alone."""
    cfg_path = os.path.join(run_dir, "config.yaml")
    cfg = {}
    if os.path.exists(cfg_path):
        with open(cfg_path, encoding="utf-8") as fh:
            cfg = yaml.safe_load(fh) or {}
    score = _load_json(os.path.join(phase_dir(run_dir, "score"), "test.json"))
    cascade = _load_json(os.path.join(phase_dir(run_dir, "cascade"), "report.json"))
    asr_done = read_done(run_dir, "asr")
    row = {
        "run": os.path.basename(os.path.abspath(run_dir)),
        "name": cfg.get("name", "?"),
        "task": "AST",
        "model": model_label(cfg),
        "data": data_label(cfg),
        "bleu": None if score is None else score.get("bleu"),
        "wer": None if score is None else score.get("wer"),
        "status": "ok" if score is not None else "pending",
        "sweep": cfg.get("sweep"),
        "cascade": cascade,
        "asr_wer": None if asr_done is None else asr_done.get("summary", {}).get("best_wer"),
        "seed": cfg.get("seed"),
    }
    return row


def _fmt(x, digits=2):
    if x is None:
        return "-"
    return f"{x:.{digits}f}"


def build_report(run_dirs):
    rows = [collect_run(d) for d in run_dirs]
    table = []
    cascade_rows = []
    for row in rows:
        if row["asr_wer"] is not None:
            table.append({"task": "ASR", "model": row["model"].split(" +")[0],
                          "data": "ASR", "bleu": None, "wer": row["asr_wer"],
                          "run": row["run"], "status": "ok"})
        if row["cascade"]:
            table.append({"task": "MT", "model": "transformer (oracle input)",
                          "data": "MT", "bleu": row["cascade"].get("oracle_bleu"),
                          "wer": None, "run": row["run"], "status": "ok"})
            cascade_rows.append({"task": "AST", "model": "cascade",
                                 "data": "ASR + MT",
                                 "bleu": row["cascade"].get("cascade_bleu"),
                                 "wer": None, "run": row["run"], "status": "ok"})
    table.extend(cascade_rows)
    e2e_rows = []
    for row in rows:
        e2e_rows.append({"task": "AST", "model": row["model"], "data": row["data"],
                         "bleu": row["bleu"], "wer": row["wer"], "run": row["run"],
                         "status": row["status"]})
    table.extend(e2e_rows)

    best_e2e = max((r["bleu"] for r in e2e_rows if r["bleu"] is not None),
                   default=None)
    best_cascade = max((r["bleu"] for r in cascade_rows if r["bleu"] is not None),
                       default=None)
    gap = None
    if best_e2e is not None and best_cascade is not None:
        gap = best_cascade - best_e2e

    sweep_rows = sorted(
        ({"size": r["sweep"]["size"], "engine": r["sweep"]["engine"],
          "policy": r["sweep"]["policy"], "axis": r["sweep"]["axis"],
          "bleu": r["bleu"], "run": r["run"],
          "copied_target": bool(r["sweep"].get("copied_target"))}
         for r in rows if r["sweep"]),
        key=lambda s: (s["axis"], s["size"], s["engine"], s["policy"]),
    )
    return {"rows": table, "gap": gap, "best_e2e": best_e2e,
            "best_cascade": best_cascade, "sweep": sweep_rows}


def format_table(report):
    headers = ["Task", "Model", "Data", "BLEU", "WER", "Status"]
    lines = []
    body = [[r["task"], r["model"], r["data"], _fmt(r["bleu"]),
             _fmt(r["wer"], 4), r["status"]] for r in report["rows"]]
    if report["gap"] is not None:
        body.append(["gap", "cascade - best e2e", "",
                     _fmt(report["gap"]), "-", "ok"])
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h)
              for i, h in enumerate(headers)]
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    lines.append("  ".join("-" * w for w in widths))
    for b in body:
        lines.append("  ".join(v.ljust(w) for v, w in zip(b, widths)))
    return "\n".join(lines)


def write_report(run_dirs, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    report = build_report(run_dirs)
    with open(os.path.join(out_dir, "bigtable.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    text = format_table(report)
    with open(os.path.join(out_dir, "bigtable.txt"), "w") as fh:
        fh.write(text + "\n")
    if report["sweep"]:
        with open(os.path.join(out_dir, "sweep.json"), "w") as fh:
            json.dump(report["sweep"], fh, indent=1, sort_keys=True)
        with open(os.path.join(out_dir, "sweep.csv"), "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=["axis", "size", "engine", "policy",
                                                    "copied_target", "bleu", "run"])
            writer.writeheader()
            for row in report["sweep"]:
                writer.writerow(row)
    return report, text
