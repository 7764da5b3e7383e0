"""Triplet corpus: records, manifests, filtering, batching, toy task."""

from .records import (
    Manifest,
    ManifestError,
    ORIGINS,
    TripletRecord,
    corpus_stats,
    stats_table,
    synth_spec,
)
from .speech import SpeechResolver
from .filtering import contamination_filter
from .batching import (
    BatchingError,
    FrameBatch,
    TextBatch,
    iter_frame_batches,
    iter_text_batches,
    pad_token_rows,
    plan_batches,
)
from .toy import (
    SOURCE_SYMBOLS,
    TARGET_SYMBOLS,
    ToySizes,
    toy_engine,
    toy_source_to_target,
    toy_target_to_source,
    toy_task,
)

__all__ = [
    "Manifest",
    "ManifestError",
    "ORIGINS",
    "TripletRecord",
    "corpus_stats",
    "stats_table",
    "synth_spec",
    "SpeechResolver",
    "contamination_filter",
    "BatchingError",
    "FrameBatch",
    "TextBatch",
    "iter_frame_batches",
    "iter_text_batches",
    "pad_token_rows",
    "plan_batches",
    "ToySizes",
    "SOURCE_SYMBOLS",
    "TARGET_SYMBOLS",
    "toy_engine",
    "toy_source_to_target",
    "toy_target_to_source",
    "toy_task",
]
