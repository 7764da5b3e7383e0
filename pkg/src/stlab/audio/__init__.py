"""Audio frontend: log-mel features and the deterministic synthesis engines."""

from .frontend import (
    FeatureSequence,
    FrontendConfig,
    MelFilterbank,
    N_MELS,
    frame_count,
    hz_to_mel,
    log_mel,
    mel_to_hz,
    read_wav,
    write_wav,
)
from .synth import SpeakerProfile, SynthEngine, moving_average3
from .featstore import FeatureStore, write_features

__all__ = [
    "FeatureSequence",
    "FrontendConfig",
    "MelFilterbank",
    "N_MELS",
    "frame_count",
    "hz_to_mel",
    "log_mel",
    "mel_to_hz",
    "read_wav",
    "write_wav",
    "SpeakerProfile",
    "SynthEngine",
    "moving_average3",
    "FeatureStore",
    "write_features",
]
