"""Checkpoint container: one zip file with meta.json + one .npy per parameter.

Layout (documented contract):
    meta.json                 -- {"format": "stlab-ckpt-1", "step": int,
                                  "dev_score": float|None, "config_hash": str,
                                  "arch": str, "components": {name: label},
                                  "shapes": {name: [..]}, "dtype": str,
                                  "extra": {...}}
    params/<name>.npy         -- numpy .npy, row-major, stored dtype

Round-trips are lossless at the stored precision. Loading verifies the
declared arch/config hash when the caller supplies expectations.
"""

from __future__ import annotations

import io
import json
import zipfile

import numpy as np

from .params import ParameterSet

FORMAT = "stlab-ckpt-1"


class CheckpointError(RuntimeError):
    pass


def save_checkpoint(path, params, *, step=0, dev_score=None, config_hash="",
                    arch="", extra=None):
    meta = {
        "format": FORMAT,
        "step": int(step),
        "dev_score": None if dev_score is None else float(dev_score),
        "config_hash": config_hash,
        "arch": arch,
        "components": {n: params.component(n) for n in params},
        "shapes": {n: list(params[n].shape) for n in params},
        "dtype": str(params.dtype),
        "extra": extra or {},
    }
    with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as zf:
        zf.writestr("meta.json", json.dumps(meta, indent=1, sort_keys=True))
        for name in params:
            buf = io.BytesIO()
            np.save(buf, params[name].data, allow_pickle=False)
            zf.writestr(f"params/{name}.npy", buf.getvalue())
    return meta


def load_checkpoint(path, *, expect_arch=None, expect_config_hash=None):
    """Returns (meta, {name: ndarray}); refuses mismatched arch/config."""
    with zipfile.ZipFile(path, "r") as zf:
        meta = json.loads(zf.read("meta.json"))
        if meta.get("format") != FORMAT:
            raise CheckpointError(f"unsupported checkpoint format {meta.get('format')!r}")
        if expect_arch is not None and meta["arch"] != expect_arch:
            raise CheckpointError(
                f"checkpoint arch {meta['arch']!r} does not match expected {expect_arch!r}"
            )
        if expect_config_hash is not None and meta["config_hash"] != expect_config_hash:
            raise CheckpointError(
                "checkpoint config hash mismatch: "
                f"{meta['config_hash']} != {expect_config_hash}"
            )
        arrays = {}
        for name in meta["components"]:
            with zf.open(f"params/{name}.npy") as fh:
                arrays[name] = np.load(io.BytesIO(fh.read()), allow_pickle=False)
    return meta, arrays


def restore_parameters(meta, arrays, dtype=None):
    """Materialize a ParameterSet from a loaded checkpoint."""
    ps = ParameterSet(dtype=dtype or meta["dtype"])
    for name, comp in meta["components"].items():
        ps.add(name, arrays[name], comp)
    return ps
