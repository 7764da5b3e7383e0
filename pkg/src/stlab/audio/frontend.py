"""Waveform -> 80-bin log-mel features, plus the WAV reader."""

from __future__ import annotations

import wave
from dataclasses import dataclass, field

import numpy as np

N_MELS = 80


@dataclass
class FrontendConfig:
    sample_rate: int = 16000
    window_ms: float = 25.0
    hop_ms: float = 10.0
    n_fft: int = 512
    n_mels: int = N_MELS
    fmin: float = 0.0
    fmax: float | None = None  # defaults to Nyquist
    log_eps: float = 1e-10

    @property
    def window(self):
        return int(round(self.sample_rate * self.window_ms / 1000.0))

    @property
    def hop(self):
        return int(round(self.sample_rate * self.hop_ms / 1000.0))


@dataclass
class FeatureSequence:
    """T x 80 feature matrix with bookkeeping (10 ms hop semantics)."""

    frames: np.ndarray
    utt_id: str = ""
    speaker_id: str = ""
    engine: str = "natural"  # natural / engine-A / engine-B

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float32)
        if self.frames.ndim != 2 or self.frames.shape[1] != N_MELS:
            raise ValueError(f"features must be T x {N_MELS}, got {self.frames.shape}")
        if self.frames.shape[0] < 1:
            raise ValueError("feature sequence must have at least one frame")
        if not np.isfinite(self.frames).all():
            raise ValueError(f"non-finite feature values in {self.utt_id!r}")

    @property
    def num_frames(self):
        return self.frames.shape[0]


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


class MelFilterbank:
    """80 triangular filters on the mel scale over rfft bins."""

    def __init__(self, sample_rate=16000, n_fft=512, n_mels=N_MELS, fmin=0.0, fmax=None):
        fmax = fmax if fmax is not None else sample_rate / 2.0
        self.sample_rate = sample_rate
        self.n_fft = n_fft
        self.n_mels = n_mels
        n_bins = n_fft // 2 + 1
        mel_pts = np.linspace(hz_to_mel(fmin), hz_to_mel(fmax), n_mels + 2)
        hz_pts = mel_to_hz(mel_pts)
        self.edges = hz_pts  # left edges, centers, right edges interleaved
        self.centers = hz_pts[1:-1]
        bin_freqs = np.arange(n_bins) * sample_rate / n_fft
        self.bin_freqs = bin_freqs
        weights = np.zeros((n_mels, n_bins))
        for k in range(n_mels):
            left, center, right = hz_pts[k], hz_pts[k + 1], hz_pts[k + 2]
            up = (bin_freqs - left) / max(center - left, 1e-12)
            down = (right - bin_freqs) / max(right - center, 1e-12)
            weights[k] = np.maximum(0.0, np.minimum(up, down))
        self.weights = weights

    def apply(self, power_spectrum):
        """(T, n_bins) power -> (T, n_mels) mel energies."""
        return power_spectrum @ self.weights.T


def frame_count(num_samples, config):
    if num_samples < config.window:
        raise ValueError(
            f"waveform of {num_samples} samples shorter than one "
            f"{config.window}-sample window"
        )
    return 1 + (num_samples - config.window) // config.hop


def log_mel(waveform, config=None, *, utt_id="", speaker_id="", filterbank=None):
    """Frame the signal, take |rfft|^2, apply the filterbank, log with a floor."""
    config = config or FrontendConfig()
    x = np.asarray(waveform, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"waveform must be 1-d, got shape {x.shape}")
    T = frame_count(x.size, config)
    win, hop = config.window, config.hop
    idx = np.arange(win)[None, :] + hop * np.arange(T)[:, None]
    frames = x[idx] * np.hanning(win)[None, :]
    spec = np.abs(np.fft.rfft(frames, n=config.n_fft, axis=1)) ** 2
    fb = filterbank or MelFilterbank(
        config.sample_rate, config.n_fft, config.n_mels, config.fmin, config.fmax
    )
    mel = fb.apply(spec)
    feats = np.log(mel + config.log_eps)
    return FeatureSequence(feats.astype(np.float32), utt_id=utt_id,
                           speaker_id=speaker_id, engine="natural")


def read_wav(path):
    """Single-channel 16-bit PCM WAV -> (float64 samples in [-1, 1], rate)."""
    with wave.open(str(path), "rb") as wf:
        if wf.getnchannels() != 1:
            raise ValueError(f"{path}: expected mono WAV, got {wf.getnchannels()} channels")
        if wf.getsampwidth() != 2:
            raise ValueError(f"{path}: expected 16-bit PCM, got {8 * wf.getsampwidth()}-bit")
        rate = wf.getframerate()
        raw = wf.readframes(wf.getnframes())
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    return samples, rate


def write_wav(path, samples, rate=16000):
    samples = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = (samples * 32767.0).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(pcm.tobytes())
