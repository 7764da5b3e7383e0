"""Decoding, metrics, and cascade inference."""

from .metrics import ScoreReport, bleu, edit_distance, wer
from .decoding import (
    DecodeConfig,
    beam_search,
    decode_in_chunks,
    decode_session,
    force_score,
    greedy_search,
    open_session,
)
from .cascade import CascadeError, cascade_translate, oracle_bleu, translate_texts

__all__ = [
    "ScoreReport",
    "bleu",
    "edit_distance",
    "wer",
    "DecodeConfig",
    "beam_search",
    "decode_in_chunks",
    "decode_session",
    "force_score",
    "greedy_search",
    "open_session",
    "CascadeError",
    "cascade_translate",
    "oracle_bleu",
    "translate_texts",
]
