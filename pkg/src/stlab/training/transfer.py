"""Encoder transfer: initialize a translation model's speech encoder from a
recognition model trained on transcript targets."""

from __future__ import annotations

import hashlib
import json


class TransferError(RuntimeError):
    pass


def encoder_signature(params):
    """Stable hash over the encoder component's (name, shape) pairs."""
    sig = [(n, list(params[n].shape)) for n in params
           if params.component(n) == "encoder"]
    return hashlib.sha256(json.dumps(sig, sort_keys=True).encode()).hexdigest()


def encoder_signature_from_meta(meta):
    sig = [(n, list(meta["shapes"][n])) for n, comp in meta["components"].items()
           if comp == "encoder"]
    return hashlib.sha256(json.dumps(sig, sort_keys=True).encode()).hexdigest()


def transfer_encoder(meta, arrays, dst_model):
    """Copy encoder parameters from a loaded checkpoint into dst_model.

    The encoder layouts must match exactly (same names and shapes); the
    decoder and attention stay freshly initialized. Returns the list of
    copied parameter names.
    """
    src_sig = encoder_signature_from_meta(meta)
    dst_sig = encoder_signature(dst_model.params)
    if src_sig != dst_sig:
        raise TransferError(
            "encoder architecture mismatch between source checkpoint and "
            f"target model ({src_sig[:12]} != {dst_sig[:12]})"
        )
    names = [n for n, comp in meta["components"].items() if comp == "encoder"]
    dst_model.params.load_arrays({n: arrays[n] for n in names})
    return names
