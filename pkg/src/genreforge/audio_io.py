"""WAV decoding and genre-per-directory dataset enumeration.

Only 16-bit integer PCM is supported, mono or stereo. Stereo is downmixed by
averaging the two channels; no resampling is ever performed.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyAudio, MalformedContainer, NoAudioFound, UnsupportedFormat

PCM_FORMAT = 0x0001
EXTENSIBLE_FORMAT = 0xFFFE
# first two bytes of the KSDATAFORMAT_SUBTYPE_PCM GUID
_PCM_SUBFORMAT_PREFIX = b"\x01\x00"


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate_hz: int
    source_path: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip holds a single (mono) channel")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def duration_s(self) -> float:
        return len(self) / self.sample_rate_hz


@dataclass
class DatasetManifest:
    entries: list[tuple[str, str]] = field(default_factory=list)
    genres: list[str] = field(default_factory=list)


def _iter_chunks(data: bytes, start: int, end: int):
    pos = start
    while pos + 8 <= end:
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = pos + 8
        yield chunk_id, body, size
        # chunks are word aligned
        pos = body + size + (size & 1)


def decode_wav(data: bytes, source_path: str = "") -> AudioClip:
    """Decode a RIFF/WAVE byte string holding 16-bit PCM audio.

    Samples are scaled by 1/32768 so that -32768 maps to exactly -1.0.
    Chunks other than ``fmt `` and ``data`` are skipped.
    """
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedContainer("missing RIFF/WAVE header")
    (riff_size,) = struct.unpack_from("<I", data, 4)
    end = min(len(data), 8 + riff_size)

    fmt = None
    pcm = None
    for chunk_id, body, size in _iter_chunks(data, 12, end):
        if chunk_id == b"fmt ":
            if size < 16 or body + 16 > len(data):
                raise MalformedContainer("truncated fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", data, body)
            if fmt[0] == EXTENSIBLE_FORMAT:
                if size < 40 or body + 40 > len(data):
                    raise MalformedContainer("truncated extensible fmt chunk")
                if data[body + 24 : body + 26] != _PCM_SUBFORMAT_PREFIX:
                    raise UnsupportedFormat("extensible WAV with non-PCM subformat")
        elif chunk_id == b"data":
            if body + size > len(data):
                raise MalformedContainer(
                    f"data chunk declares {size} bytes, only {len(data) - body} present"
                )
            pcm = data[body : body + size]
        if fmt is not None and pcm is not None:
            break

    if fmt is None:
        raise MalformedContainer("no fmt chunk")
    if pcm is None:
        raise MalformedContainer("no data chunk")

    format_code, channels, sample_rate, _, _, bits = fmt
    if format_code not in (PCM_FORMAT, EXTENSIBLE_FORMAT):
        raise UnsupportedFormat(f"format code {format_code:#06x} is not PCM")
    if bits != 16:
        raise UnsupportedFormat(f"bit depth {bits} is not supported (16 only)")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels; only mono and stereo are supported")
    if sample_rate == 0:
        raise MalformedContainer("sample rate is zero")

    frame_bytes = 2 * channels
    n_frames = len(pcm) // frame_bytes
    if n_frames == 0:
        raise EmptyAudio("data chunk holds no complete sample frame")
    ints = np.frombuffer(pcm, dtype="<i2", count=n_frames * channels)
    samples = ints.reshape(n_frames, channels).astype(np.float64) / 32768.0
    if channels == 2:
        samples = samples.mean(axis=1)
    else:
        samples = samples[:, 0]
    return AudioClip(samples, int(sample_rate), source_path)


def load_wav(path) -> AudioClip:
    path = Path(path)
    return decode_wav(path.read_bytes(), source_path=str(path))


def encode_wav(samples, sample_rate_hz: int) -> bytes:
    """Encode mono float samples in [-1, 1] as a 16-bit PCM WAV byte string."""
    x = np.asarray(samples, dtype=np.float64)
    ints = np.clip(np.round(x * 32768.0), -32768, 32767).astype("<i2")
    payload = ints.tobytes()
    fmt = struct.pack("<HHIIHH", PCM_FORMAT, 1, sample_rate_hz, 2 * sample_rate_hz, 2, 16)
    body = b"WAVE" + b"fmt " + struct.pack("<I", 16) + fmt
    body += b"data" + struct.pack("<I", len(payload)) + payload
    if len(payload) & 1:
        body += b"\x00"
    return b"RIFF" + struct.pack("<I", len(body)) + body


def scan_dataset(root_dir) -> DatasetManifest:
    """List ``<root>/<genre>/*.wav`` files, sorted by path.

    Genre directories without audio stay in ``genres`` but contribute no entries.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise NotADirectoryError(f"{root} is not a directory")

    genres = sorted(p.name for p in root.iterdir() if p.is_dir())
    entries = []
    for genre in genres:
        for wav in (root / genre).iterdir():
            if wav.is_file() and wav.suffix.lower() == ".wav":
                entries.append((os.fspath(wav), genre))
    if not entries:
        raise NoAudioFound(f"no .wav files under any genre directory of {root}")
    entries.sort()
    return DatasetManifest(entries=entries, genres=genres)


def take_segment(clip: AudioClip, duration_s: float) -> AudioClip:
    """Truncate to the first ``duration_s`` seconds; shorter clips pass through."""
    if not duration_s > 0:
        raise ValueError("duration_s must be positive")
    n = math.floor(duration_s * clip.sample_rate_hz)
    if n >= len(clip):
        return clip
    return AudioClip(clip.samples[:n], clip.sample_rate_hz, clip.source_path)
