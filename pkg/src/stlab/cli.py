"""Command-line experiment runner: the whole pipeline as subcommands."""

from __future__ import annotations

import argparse
import json
import os
import sys

import yaml

from .augment.sweep import tts_sweep
from .pipeline import config as config_mod
from .pipeline import phases, report
from .pipeline.config import ConfigError
from .pipeline.phases import PrerequisiteError

PHASE_COMMANDS = {
    "prepare": phases.cmd_prepare,
    "train-mt": phases.cmd_train_mt,
    "train-asr": phases.cmd_train_asr,
    "pretrain": phases.cmd_pretrain,
    "augment": phases.cmd_augment,
    "train": phases.cmd_train,
    "finetune": phases.cmd_finetune,
    "decode": phases.cmd_decode,
    "score": phases.cmd_score,
    "cascade": phases.cmd_cascade,
}


def _add_config_args(p):
    p.add_argument("--config", "-c", required=True, help="YAML experiment config")
    p.add_argument("--set", dest="sets", action="append", default=[],
                   metavar="KEY=VALUE", help="dotted-path config override")
    p.add_argument("--seed", type=int, default=None, help="override the run seed")
    p.add_argument("--out", default=None, help="run directory (default from config)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stlab",
        description="Desk-scale speech translation laboratory",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in PHASE_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} phase")
        _add_config_args(p)
        if name in ("decode", "score", "cascade"):
            p.add_argument("--split", default="test", choices=["dev", "test"])
    p = sub.add_parser("run", help="run every configured phase in order")
    _add_config_args(p)
    p = sub.add_parser("report", help="comparison table over run directories")
    p.add_argument("runs", nargs="+", help="completed run directories")
    p.add_argument("--out", default="report", help="report output directory")
    p = sub.add_parser("sweep", help="emit TTS sweep config files")
    _add_config_args(p)
    p.add_argument("--sizes", required=True,
                   help="comma-separated ascending subsample sizes")
    return parser


def _resolve(args):
    cfg = config_mod.load_config(args.config, sets=args.sets, seed=args.seed,
                                 out_dir=args.out)
    run_dir = cfg.get("out_dir") or os.path.join("runs", cfg["name"])
    cfg["out_dir"] = run_dir
    os.makedirs(run_dir, exist_ok=True)
    config_mod.save_config(cfg, os.path.join(run_dir, "config.yaml"))
    return cfg, run_dir


def run_pipeline(cfg, run_dir):
    """Execute the phases enabled by the config, in dependency order."""
    results = {"prepare": phases.cmd_prepare(cfg, run_dir)}
    steps = cfg["augmentation"]["steps"]
    needs_mt = any(s.get("method") == "mt_complete" for s in steps)
    if needs_mt or cfg["phases"].get("cascade", False):
        results["mt"] = phases.cmd_train_mt(cfg, run_dir)
    if cfg["phases"].get("cascade", False):
        results["asr"] = phases.cmd_train_asr(cfg, run_dir)
    if cfg["phases"]["augment"]:
        results["augment"] = phases.cmd_augment(cfg, run_dir)
    if cfg["phases"]["pretrain"]:
        results["pretrain"] = phases.cmd_pretrain(cfg, run_dir)
    results["train"] = phases.cmd_train(cfg, run_dir)
    if cfg["phases"]["finetune"]:
        results["finetune"] = phases.cmd_finetune(cfg, run_dir)
    results["decode"] = phases.cmd_decode(cfg, run_dir)
    results["score"] = phases.cmd_score(cfg, run_dir)
    if cfg["phases"].get("cascade", False):
        results["cascade"] = phases.cmd_cascade(cfg, run_dir)
    return results


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            _, text = report.write_report(args.runs, args.out)
            print(text)
            return 0
        if args.command == "sweep":
            cfg, run_dir = _resolve(args)
            sizes = [int(s) for s in args.sizes.split(",")]
            cells = tts_sweep(cfg, sizes)
            sweep_dir = os.path.join(run_dir, "sweep-configs")
            os.makedirs(sweep_dir, exist_ok=True)
            for name, cell_cfg in cells:
                cell_cfg = dict(cell_cfg)
                cell_cfg["name"] = name
                cell_cfg["out_dir"] = os.path.join(run_dir, "sweep", name)
                path = os.path.join(sweep_dir, f"{name}.yaml")
                with open(path, "w", encoding="utf-8") as fh:
                    yaml.safe_dump(cell_cfg, fh, sort_keys=True)
                print(path)
            return 0
        cfg, run_dir = _resolve(args)
        if args.command == "run":
            results = run_pipeline(cfg, run_dir)
            print(json.dumps(results, indent=1, sort_keys=True))
            return 0
        fn = PHASE_COMMANDS[args.command]
        if args.command in ("decode", "score", "cascade"):
            result = fn(cfg, run_dir, split=args.split)
        else:
            result = fn(cfg, run_dir)
        print(json.dumps(result, indent=1, sort_keys=True))
        return 0
    except (PrerequisiteError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
