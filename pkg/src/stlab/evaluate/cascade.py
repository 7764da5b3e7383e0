"""Two-stage cascade (recognize then translate) and the oracle upper bound."""

from __future__ import annotations

from ..text.normalize import normalize
from ..text.subword import EOS_ID
from .decoding import DecodeConfig, decode_in_chunks
from .metrics import bleu


class CascadeError(RuntimeError):
    pass


def translate_texts(mt_model, texts, src_subword, tgt_subword, cfg=None):
    """Subword-encode, decode with the text model, subword-decode."""
    cfg = cfg or DecodeConfig()
    src_ids = [src_subword.encode(t) + [EOS_ID] for t in texts]
    out_ids = decode_in_chunks(mt_model, src_ids, None, cfg)
    return [tgt_subword.decode(ids) for ids in out_ids]


def cascade_translate(asr_model, mt_model, features_list, *, asr_subword,
                      mt_src_subword, mt_tgt_subword, recipe="toy",
                      asr_cfg=None, mt_cfg=None):
    """decode ASR -> normalize -> re-encode with MT-side subwords -> decode MT."""
    asr_cfg = asr_cfg or DecodeConfig()
    mt_cfg = mt_cfg or DecodeConfig()
    try:
        hyp_ids = decode_in_chunks(asr_model, features_list, None, asr_cfg)
        transcripts = [asr_subword.decode(ids) for ids in hyp_ids]
    except Exception as e:  # noqa: BLE001 - stage attribution is the contract
        raise CascadeError(f"ASR stage failed: {e}") from e
    try:
        normalized = [normalize(t, recipe) for t in transcripts]
    except Exception as e:
        raise CascadeError(f"normalization stage failed: {e}") from e
    try:
        translations = translate_texts(mt_model, normalized, mt_src_subword,
                                       mt_tgt_subword, mt_cfg)
    except Exception as e:
        raise CascadeError(f"MT stage failed: {e}") from e
    return translations, transcripts


def oracle_bleu(mt_model, transcripts, references, *, mt_src_subword,
                mt_tgt_subword, recipe="toy", mt_cfg=None, smooth=False):
    """Translate the gold transcripts and score against the references."""
    if any(t is None for t in transcripts):
        raise ValueError("oracle BLEU needs a gold transcript for every record")
    normalized = [normalize(t, recipe) for t in transcripts]
    translations = translate_texts(mt_model, normalized, mt_src_subword,
                                   mt_tgt_subword, mt_cfg or DecodeConfig())
    return bleu(translations, references, smooth=smooth, recipe=recipe), translations
