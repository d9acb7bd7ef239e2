import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import float_to_int16, wav_bytes
from genreforge.audio_io import (
    AudioClip,
    decode_wav,
    encode_wav,
    scan_dataset,
    take_segment,
)
from genreforge.errors import EmptyAudio, MalformedContainer, NoAudioFound, UnsupportedFormat


def test_zero_sample():
    clip = decode_wav(wav_bytes([0]))
    assert clip.samples.tolist() == [0.0]


def test_most_negative_sample_maps_to_minus_one():
    assert decode_wav(wav_bytes([-32768])).samples.tolist() == [-1.0]


def test_stereo_downmix_cancels():
    clip = decode_wav(wav_bytes([[16384, -16384]], channels=2))
    assert clip.samples.tolist() == [0.0]


def test_stereo_downmix_is_channel_mean():
    frames = np.array([[1000, 3000], [-200, 0], [32767, 32767]])
    clip = decode_wav(wav_bytes(frames, channels=2))
    np.testing.assert_array_equal(clip.samples, frames.mean(axis=1) / 32768)


def test_one_second_sine_round_trip():
    sr = 22050
    x = 0.8 * np.sin(2 * np.pi * 440 * np.arange(sr) / sr)
    ints = float_to_int16(x)
    clip = decode_wav(wav_bytes(ints, sr))
    assert len(clip) == 22050
    assert clip.sample_rate_hz == 22050
    np.testing.assert_array_equal(clip.samples, ints / 32768.0)
    assert np.max(np.abs(clip.samples - x)) <= 1 / 32768 + 1e-12


def test_sample_rate_read_from_fmt():
    assert decode_wav(wav_bytes([1, 2, 3], sample_rate=8000)).sample_rate_hz == 8000


def test_unknown_chunks_are_skipped():
    raw = wav_bytes([5, -5])
    # insert a LIST chunk with odd length (padded) between fmt and data
    junk = b"LIST" + struct.pack("<I", 3) + b"abc\x00"
    data_at = raw.index(b"data")
    patched = raw[:data_at] + junk + raw[data_at:]
    patched = patched[:4] + struct.pack("<I", len(patched) - 8) + patched[8:]
    assert decode_wav(patched).samples.tolist() == [5 / 32768, -5 / 32768]


@pytest.mark.parametrize(
    "mutate, error",
    [
        (lambda b: b"RIFX" + b[4:], MalformedContainer),
        (lambda b: b[:10], MalformedContainer),
        (lambda b: b[:-2], MalformedContainer),  # data chunk shorter than declared
        (lambda b: b.replace(b"data", b"dat_"), MalformedContainer),
        (lambda b: b.replace(b"fmt ", b"fmx "), MalformedContainer),
    ],
)
def test_malformed(mutate, error):
    with pytest.raises(error):
        decode_wav(mutate(wav_bytes([1, 2, 3])))


def _with_fmt(raw, **fields):
    off = raw.index(b"fmt ") + 8
    code, ch, sr, br, ba, bits = struct.unpack_from("<HHIIHH", raw, off)
    vals = dict(code=code, ch=ch, sr=sr, br=br, ba=ba, bits=bits)
    vals.update(fields)
    packed = struct.pack("<HHIIHH", *(vals[k] for k in ("code", "ch", "sr", "br", "ba", "bits")))
    return raw[:off] + packed + raw[off + 16 :]


def test_non_pcm_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav(_with_fmt(wav_bytes([1, 2]), code=3))


def test_bit_depth_rejected():
    with pytest.raises(UnsupportedFormat):
        decode_wav(_with_fmt(wav_bytes([1, 2]), bits=24))


def test_empty_data_chunk():
    with pytest.raises(EmptyAudio):
        decode_wav(wav_bytes([]))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=1, max_size=300))
def test_encode_decode_round_trip(values):
    clip = decode_wav(encode_wav(values, 22050))
    assert np.all(clip.samples >= -1.0) and np.all(clip.samples < 1.0)
    assert np.max(np.abs(clip.samples - np.asarray(values))) <= 1 / 32768 + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-32768, 32767), min_size=1, max_size=200))
def test_decoded_range(ints):
    s = decode_wav(wav_bytes(ints)).samples
    assert s.min() >= -1.0 and s.max() < 1.0


def _touch_wavs(root, layout):
    for genre, names in layout.items():
        d = root / genre
        d.mkdir(parents=True)
        for n in names:
            (d / n).write_bytes(wav_bytes([0, 1]))


def test_scan_dataset(tmp_path):
    _touch_wavs(tmp_path, {"jazz": ["c.wav"], "blues": ["b.wav", "a.wav"], "empty": []})
    (tmp_path / "jazz" / "notes.txt").write_text("x")
    m = scan_dataset(tmp_path)
    assert len(m.entries) == 3
    assert m.genres == ["blues", "empty", "jazz"]
    assert [label for _, label in m.entries] == ["blues", "blues", "jazz"]
    assert m.entries == sorted(m.entries)
    assert scan_dataset(tmp_path) == m


def test_scan_hundred_tracks(tmp_path):
    _touch_wavs(tmp_path, {"classical": [f"classical.{i:05d}.wav" for i in range(100)]})
    assert len(scan_dataset(tmp_path).entries) == 100


def test_scan_empty_root(tmp_path):
    with pytest.raises(NoAudioFound):
        scan_dataset(tmp_path)


def test_scan_not_a_directory(tmp_path):
    f = tmp_path / "file"
    f.write_text("")
    with pytest.raises(NotADirectoryError):
        scan_dataset(f)


def test_take_segment():
    sr = 22050
    thirty = AudioClip(np.zeros(30 * sr), sr)
    assert take_segment(thirty, 30) is thirty
    forty = AudioClip(np.zeros(40 * sr), sr)
    assert len(take_segment(forty, 30)) == 661500
    ten = AudioClip(np.zeros(10 * sr), sr)
    assert take_segment(ten, 30) is ten
    with pytest.raises(ValueError):
        take_segment(ten, 0)


def test_clip_is_immutable():
    clip = AudioClip([0.1, 0.2], 100)
    with pytest.raises(ValueError):
        clip.samples[0] = 1.0
