"""Triplet completion and experiment sweeps."""

from .complete import SpeakerPolicy, mix, mt_complete, tts_complete
from .sweep import tts_sweep

__all__ = ["SpeakerPolicy", "mix", "mt_complete", "tts_complete", "tts_sweep"]
