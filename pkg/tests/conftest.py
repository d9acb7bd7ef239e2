import io
import wave
from pathlib import Path

import numpy as np
import pytest

from genreforge.preprocess import Dataset

_acceptance = {}


def make_dataset(X, y=None, n_classes=None):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.zeros(X.shape[0], dtype=int) if y is None else np.asarray(y)
    n_classes = n_classes or int(y.max()) + 1
    return Dataset(X, y, [f"c{i}" for i in range(n_classes)], [f"f{j}" for j in range(X.shape[1])])


def blobs(n_per_class=30, n_classes=3, n_features=4, spread=0.4, seed=0):
    """Well separated Gaussian clusters."""
    rng = np.random.default_rng(seed)
    centres = rng.normal(0, 3, size=(n_classes, n_features))
    X = np.vstack([c + spread * rng.normal(size=(n_per_class, n_features)) for c in centres])
    y = np.repeat(np.arange(n_classes), n_per_class)
    return make_dataset(X, y, n_classes)


def wav_bytes(samples, sample_rate=22050, channels=1):
    """16-bit PCM via the stdlib ``wave`` writer (independent of our encoder).

    ``samples`` are ints in int16 range; for stereo pass shape (n, 2).
    """
    ints = np.asarray(samples, dtype="<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(2)
        w.setframerate(sample_rate)
        w.writeframes(ints.tobytes())
    return buf.getvalue()


def float_to_int16(x):
    return np.clip(np.round(np.asarray(x) * 32768), -32768, 32767).astype(np.int16)


def write_wav(path, samples_float, sample_rate=22050):
    Path(path).write_bytes(wav_bytes(float_to_int16(samples_float), sample_rate))


def tone(freq, seconds=1.0, sr=22050, amp=0.5):
    t = np.arange(int(seconds * sr)) / sr
    return amp * np.sin(2 * np.pi * freq * t)


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance_id", None)
    if marker is None:
        return
    num, title = marker
    state = _acceptance.setdefault(num, [title, "PASS"])
    if report.when == "call" and report.skipped:
        state[1] = "SKIP"
    elif report.failed:
        state[1] = "FAIL"
    elif report.skipped and state[1] == "PASS":
        state[1] = "SKIP"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is not None:
        report.acceptance_id = (mark.args[0], mark.kwargs.get("title", item.name))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_acceptance):
        title, state = _acceptance[num]
        terminalreporter.write_line(f"{state:4}  AC-{num:02d}  {title}")
