"""Per-clip audio descriptors: ZCR, spectral centroid and roll-off, MFCC, chroma.

Frame-level series are summarised by their mean and population standard
deviation, giving a 70-column vector per clip (see ``FEATURE_NAMES``).
"""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .audio_io import AudioClip, take_segment
from .dsp import FrameConfig, Spectrogram, Window, stft
from .errors import DegenerateFilter, TooShort

LOG_FLOOR = 1e-10
N_CHROMA = 12
C1_HZ = 32.703


def _schema(n_mfcc: int = 20) -> list[str]:
    names = ["zcr_mean", "zcr_std", "centroid_mean", "centroid_std", "rolloff_mean", "rolloff_std"]
    names += [f"mfcc{i}_mean" for i in range(1, n_mfcc + 1)]
    names += [f"mfcc{i}_std" for i in range(1, n_mfcc + 1)]
    names += [f"chroma{i}_mean" for i in range(1, N_CHROMA + 1)]
    names += [f"chroma{i}_std" for i in range(1, N_CHROMA + 1)]
    return names


FEATURE_NAMES = _schema()


@dataclass(frozen=True)
class RolloffConfig:
    p: float = 0.85

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise ValueError("roll-off fraction must lie in (0, 1]")


@dataclass(frozen=True)
class ChromaConfig:
    f_ref_hz: float = C1_HZ
    fmin_hz: float = 20.0

    def __post_init__(self):
        if self.f_ref_hz <= 0 or self.fmin_hz <= 0:
            raise ValueError("chroma reference and minimum frequency must be positive")


@dataclass(frozen=True)
class MelFilterBank:
    n_mels: int
    fmin_hz: float
    fmax_hz: float
    corner_mels: np.ndarray
    weights: np.ndarray


@dataclass(frozen=True)
class AnalysisConfig:
    """Everything needed to turn a clip into a feature vector."""

    frame_length: int = 2048
    hop_length: int = 512
    window: str = "hann"
    n_mels: int = 40
    n_mfcc: int = 20
    fmin_hz: float = 0.0
    fmax_hz: float | None = None
    rolloff_p: float = 0.85
    chroma_f_ref_hz: float = C1_HZ
    chroma_fmin_hz: float = 20.0
    segment_s: float = 30.0

    def __post_init__(self):
        if not 1 <= self.n_mfcc <= self.n_mels:
            raise ValueError("need 1 <= n_mfcc <= n_mels")
        # validate eagerly
        self.frame_config()
        self.rolloff()
        self.chroma()

    def frame_config(self) -> FrameConfig:
        return FrameConfig(self.frame_length, self.hop_length, Window(self.window))

    def rolloff(self) -> RolloffConfig:
        return RolloffConfig(self.rolloff_p)

    def chroma(self) -> ChromaConfig:
        return ChromaConfig(self.chroma_f_ref_hz, self.chroma_fmin_hz)

    def feature_names(self) -> list[str]:
        return _schema(self.n_mfcc)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FeatureVector:
    values: np.ndarray
    schema: list[str] = field(default_factory=lambda: list(FEATURE_NAMES))

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.schema, self.values.tolist()))


def zero_crossing_rate(clip) -> float:
    """Fraction of adjacent sample pairs whose product is strictly negative."""
    x = np.asarray(clip.samples if isinstance(clip, AudioClip) else clip, dtype=np.float64)
    if x.size < 2:
        raise TooShort(f"zero crossing rate needs at least 2 samples, got {x.size}")
    crossings = np.count_nonzero(x[:-1] * x[1:] < 0)
    return crossings / (x.size - 1)


def spectral_centroid(spec: Spectrogram) -> np.ndarray:
    """Amplitude-weighted mean frequency per frame; silent frames give 0."""
    mags = spec.magnitudes
    total = mags.sum(axis=1)
    weighted = mags @ spec.bin_freqs_hz
    out = np.zeros(mags.shape[0])
    nz = total > 0
    out[nz] = weighted[nz] / total[nz]
    return out


def spectral_rolloff(spec: Spectrogram, cfg: RolloffConfig = RolloffConfig()) -> np.ndarray:
    """Lowest bin frequency whose cumulative amplitude reaches ``p`` of the total."""
    cumulative = np.cumsum(spec.magnitudes, axis=1)
    total = cumulative[:, -1]
    reached = cumulative >= (cfg.p * total)[:, None]
    k_roll = np.argmax(reached, axis=1)
    out = spec.bin_freqs_hz[k_roll].astype(np.float64)
    out[total <= 0] = 0.0
    return out


def mel_scale(f_hz):
    return 2595.0 * np.log10(1.0 + np.asarray(f_hz, dtype=np.float64) / 700.0)


def inverse_mel_scale(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def build_mel_filterbank(
    n_mels: int, fmin_hz: float, fmax_hz: float, num_bins: int, sample_rate_hz: int
) -> MelFilterBank:
    """Triangular filters with corners equally spaced on the mel scale.

    Weights are evaluated at the FFT bin centre frequencies of a real
    spectrum with ``num_bins`` bins spanning 0 .. ``sample_rate_hz / 2``.
    """
    if n_mels < 1:
        raise ValueError("n_mels must be >= 1")
    if not 0 <= fmin_hz < fmax_hz <= sample_rate_hz / 2:
        raise ValueError("need 0 <= fmin < fmax <= sample_rate / 2")
    if num_bins < n_mels + 2:
        raise ValueError("num_bins must be at least n_mels + 2")

    lo, hi = float(mel_scale(fmin_hz)), float(mel_scale(fmax_hz))
    step = (hi - lo) / (n_mels + 1)
    corner_mels = lo + step * np.arange(n_mels + 2)
    corners = inverse_mel_scale(corner_mels)
    freqs = np.arange(num_bins) * (sample_rate_hz / (2.0 * (num_bins - 1)))

    weights = np.zeros((n_mels, num_bins))
    for m in range(n_mels):
        left, centre, right = corners[m], corners[m + 1], corners[m + 2]
        rising = (freqs - left) / (centre - left)
        falling = (right - freqs) / (right - centre)
        weights[m] = np.maximum(0.0, np.minimum(rising, falling))
        if not np.any(weights[m] > 0):
            raise DegenerateFilter(
                f"mel filter {m} ({left:.1f}-{right:.1f} Hz) covers no FFT bin; "
                f"reduce n_mels or increase frame_length"
            )
    weights.setflags(write=False)
    return MelFilterBank(n_mels, float(fmin_hz), float(fmax_hz), corner_mels, weights)


_cached_filterbank = functools.lru_cache(maxsize=16)(build_mel_filterbank)


@functools.lru_cache(maxsize=8)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row ``k`` is the ``k``-th cosine."""
    i = np.arange(n)
    basis = np.cos(np.pi * (2 * i[None, :] + 1) * i[:, None] / (2 * n))
    scale = np.full(n, math.sqrt(2.0 / n))
    scale[0] = math.sqrt(1.0 / n)
    m = basis * scale[:, None]
    m.setflags(write=False)
    return m


def log_mel_energies(spec: Spectrogram, bank: MelFilterBank) -> np.ndarray:
    power = spec.magnitudes**2
    return np.log(power @ bank.weights.T + LOG_FLOOR)


def mfcc(spec: Spectrogram, bank: MelFilterBank, n_mfcc: int = 20) -> np.ndarray:
    if not 1 <= n_mfcc <= bank.n_mels:
        raise ValueError("need 1 <= n_mfcc <= n_mels")
    logmel = log_mel_energies(spec, bank)
    return logmel @ dct_matrix(bank.n_mels)[:n_mfcc].T


def chroma_class(f_hz, f_ref_hz: float = C1_HZ):
    """Nearest pitch class of each frequency, ties rounded upward."""
    c = np.mod(12.0 * np.log2(np.asarray(f_hz, dtype=np.float64) / f_ref_hz), 12.0)
    return np.floor(c + 0.5).astype(np.int64) % N_CHROMA


def _chroma_map(bin_freqs_hz: np.ndarray, cfg: ChromaConfig) -> np.ndarray:
    mapping = np.zeros((bin_freqs_hz.size, N_CHROMA))
    usable = bin_freqs_hz >= cfg.fmin_hz
    mapping[np.flatnonzero(usable), chroma_class(bin_freqs_hz[usable], cfg.f_ref_hz)] = 1.0
    return mapping


def chroma(spec: Spectrogram, cfg: ChromaConfig = ChromaConfig()) -> np.ndarray:
    """12-bin pitch-class profile per frame, L1-normalised (silent rows stay 0)."""
    raw = spec.magnitudes @ _chroma_map(spec.bin_freqs_hz, cfg)
    totals = raw.sum(axis=1, keepdims=True)
    return np.divide(raw, totals, out=np.zeros_like(raw), where=totals > 0)


def _mean_std(series: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return series.mean(axis=0), series.std(axis=0)


def extract_features(clip: AudioClip, config: AnalysisConfig | None = None) -> FeatureVector:
    """Full pipeline for one clip: segment, STFT, descriptors, mean/std pooling."""
    config = config or AnalysisConfig()
    clip = take_segment(clip, config.segment_s)
    zcr = zero_crossing_rate(clip)

    spec = stft(clip, config.frame_config())
    fmax = config.fmax_hz if config.fmax_hz is not None else clip.sample_rate_hz / 2
    bank = _cached_filterbank(
        config.n_mels, config.fmin_hz, fmax, spec.num_bins, clip.sample_rate_hz
    )

    cen_mean, cen_std = _mean_std(spectral_centroid(spec))
    roll_mean, roll_std = _mean_std(spectral_rolloff(spec, config.rolloff()))
    mfcc_mean, mfcc_std = _mean_std(mfcc(spec, bank, config.n_mfcc))
    chroma_mean, chroma_std = _mean_std(chroma(spec, config.chroma()))

    values = np.concatenate(
        [
            # ZCR is a single global value, so its spread is zero
            [zcr, 0.0, cen_mean, cen_std, roll_mean, roll_std],
            mfcc_mean,
            mfcc_std,
            chroma_mean,
            chroma_std,
        ]
    )
    return FeatureVector(values=values, schema=config.feature_names())
