"""Config generators for the TTS quantity / quality / diversity sweeps.

Each cell is a full experiment config dict derived from a shared base so
the curves are comparable: same corpus seed, same training seed, differing
only in the TTS completion step (amount, engine, speaker policy, or the
copied-target variant).
"""

from __future__ import annotations

import copy


def _with_tts_step(base, *, engine, size, policy_mode, speaker=0,
                   from_translation=False, tts_seed=13):
    cfg = copy.deepcopy(base)
    aug = cfg.setdefault("augmentation", {})
    steps = [s for s in aug.get("steps", []) if s.get("method") != "tts_complete"]
    steps.append({
        "method": "tts_complete",
        "source": "mt",
        "engine": engine,
        "subsample": int(size),
        "seed": tts_seed,
        "speakers": {"mode": policy_mode, "speaker": speaker},
        "from_translation": bool(from_translation),
    })
    aug["steps"] = steps
    cfg["phases"] = dict(cfg.get("phases", {}), augment=True)
    return cfg


def tts_sweep(base_config, sizes, engines=("A", "B"), policies=("single", "round_robin"),
              include_copied_target=True, tts_seed=13):
    """Returns [(name, config)] covering the quantity curve (engine A,
    round-robin, ascending sizes), the quality x diversity grid at the
    largest size, and the copied-target variant."""
    if list(sizes) != sorted(sizes):
        raise ValueError("sizes must be ascending")
    cells = []
    largest = sizes[-1]
    for size in sizes:
        cfg = _with_tts_step(base_config, engine="A", size=size,
                             policy_mode="round_robin", tts_seed=tts_seed)
        cfg["sweep"] = {"axis": "quantity", "size": int(size), "engine": "A",
                        "policy": "round_robin"}
        cells.append((f"tts-amount-{size}", cfg))
    for engine in engines:
        for policy in policies:
            if engine == "A" and policy == "round_robin":
                continue  # already on the quantity curve at the largest size
            cfg = _with_tts_step(base_config, engine=engine, size=largest,
                                 policy_mode=policy, tts_seed=tts_seed)
            cfg["sweep"] = {"axis": "grid", "size": int(largest), "engine": engine,
                            "policy": policy}
            cells.append((f"tts-grid-{engine}-{policy}", cfg))
    if include_copied_target:
        cfg = _with_tts_step(base_config, engine="B", size=largest,
                             policy_mode="single", from_translation=True,
                             tts_seed=tts_seed)
        cfg["sweep"] = {"axis": "copied_target", "size": int(largest),
                        "engine": "B", "policy": "single", "copied_target": True}
        cells.append(("tts-copied-target", cfg))
    return cells
