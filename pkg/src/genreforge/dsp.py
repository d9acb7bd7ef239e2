"""Framing, windowing and magnitude spectra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .audio_io import AudioClip


class Window(str, enum.Enum):
    HANN = "hann"
    RECTANGULAR = "rectangular"


@dataclass(frozen=True)
class FrameConfig:
    frame_length: int = 2048
    hop_length: int = 512
    window: Window = Window.HANN

    def __post_init__(self):
        n = self.frame_length
        if n < 1 or n & (n - 1):
            raise ValueError(f"frame_length must be a power of two, got {n}")
        if not 0 < self.hop_length <= n:
            raise ValueError("hop_length must satisfy 0 < hop_length <= frame_length")
        object.__setattr__(self, "window", Window(self.window))


@dataclass(frozen=True)
class Spectrogram:
    """Magnitude spectra, one row per frame, ``frame_length // 2 + 1`` bins."""

    magnitudes: np.ndarray
    bin_freqs_hz: np.ndarray
    sample_rate_hz: int
    config: FrameConfig

    @property
    def num_frames(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def num_bins(self) -> int:
        return self.magnitudes.shape[1]


def frame_signal(samples, config: FrameConfig) -> np.ndarray:
    """Cut ``samples`` into ``ceil(T / hop)`` frames, zero-padding the tail."""
    x = np.asarray(samples.samples if isinstance(samples, AudioClip) else samples, dtype=np.float64)
    if x.size == 0:
        raise ValueError("cannot frame an empty signal")
    n, hop = config.frame_length, config.hop_length
    num_frames = math.ceil(x.size / hop)
    padded = np.zeros((num_frames - 1) * hop + n)
    padded[: x.size] = x
    starts = np.arange(num_frames) * hop
    return padded[starts[:, None] + np.arange(n)]


def hann_window(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("window length must be >= 1")
    if n == 1:
        return np.ones(1)
    w = 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / (n - 1))
    # force exact symmetry
    return 0.5 * (w + w[::-1])


def window_for(config: FrameConfig) -> np.ndarray:
    if config.window is Window.HANN:
        return hann_window(config.frame_length)
    return np.ones(config.frame_length)


def fft_magnitude(frames) -> np.ndarray:
    """|DFT| over the last axis, non-redundant half (``n // 2 + 1`` bins)."""
    frames = np.asarray(frames, dtype=np.float64)
    n = frames.shape[-1]
    if n < 1 or n & (n - 1):
        raise ValueError(f"frame length must be a power of two, got {n}")
    return np.abs(np.fft.rfft(frames, axis=-1))


def bin_frequencies(frame_length: int, sample_rate_hz: int) -> np.ndarray:
    return np.arange(frame_length // 2 + 1) * (sample_rate_hz / frame_length)


def stft(clip: AudioClip, config: FrameConfig | None = None) -> Spectrogram:
    config = config or FrameConfig()
    frames = frame_signal(clip.samples, config) * window_for(config)
    mags = fft_magnitude(frames)
    mags.setflags(write=False)
    return Spectrogram(
        magnitudes=mags,
        bin_freqs_hz=bin_frequencies(config.frame_length, clip.sample_rate_hz),
        sample_rate_hz=clip.sample_rate_hz,
        config=config,
    )
