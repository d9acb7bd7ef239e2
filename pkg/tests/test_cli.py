import json

import numpy as np
import pytest

from conftest import tone, write_wav
from genreforge.cli import main
from genreforge.config import ConfigError, RunConfig, dump_config, load_config, parse_assignment
from genreforge.features import FEATURE_NAMES
from genreforge.preprocess import read_feature_csv

GENRES = {"blues": 220.0, "country": 660.0, "jazz": 1760.0}


def clip(freq, rng, seconds=0.5):
    return tone(freq * (1 + 0.02 * rng.normal()), seconds) + 0.01 * rng.normal(size=int(seconds * 22050))


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    rng = np.random.default_rng(0)
    for genre, freq in GENRES.items():
        (root / genre).mkdir()
        for i in range(10):
            write_wav(root / genre / f"{genre}.{i:05d}.wav", clip(freq, rng))
    return root


@pytest.fixture(scope="module")
def features_csv(corpus, tmp_path_factory):
    out = tmp_path_factory.mktemp("feat") / "features.csv"
    assert main(["extract", "--data", str(corpus), "--out", str(out), "--jobs", "1"]) == 0
    return out


def test_extract_rows_sorted(features_csv):
    data = read_feature_csv(features_csv, FEATURE_NAMES)
    assert len(data) == 30 and data.n_features == 70
    assert data.label_names == sorted(GENRES)
    assert list(data.row_ids) == sorted(data.row_ids)


def test_extract_parallel_matches_serial(corpus, features_csv, tmp_path):
    out = tmp_path / "par.csv"
    assert main(["extract", "--data", str(corpus), "--out", str(out), "--jobs", "2"]) == 0
    assert out.read_bytes() == features_csv.read_bytes()


def test_extract_skips_corrupt_file(tmp_path, caplog):
    rng = np.random.default_rng(1)
    (tmp_path / "rock").mkdir()
    for i in range(9):
        write_wav(tmp_path / "rock" / f"{i}.wav", clip(440, rng))
    (tmp_path / "rock" / "bad.wav").write_bytes(b"RIFF\x00\x00")
    out = tmp_path / "f.csv"
    assert main(["extract", "--data", str(tmp_path), "--out", str(out), "--jobs", "1"]) == 0
    assert len(read_feature_csv(out)) == 9
    assert any("bad.wav" in r.getMessage() and r.levelname == "WARNING" for r in caplog.records)


def test_extract_empty_root(tmp_path):
    (tmp_path / "data").mkdir()
    assert main(["extract", "--data", str(tmp_path / "data"), "--out", str(tmp_path / "f.csv")]) == 2
    assert main(["extract", "--data", str(tmp_path / "missing"), "--out", str(tmp_path / "f.csv")]) == 2


def test_extract_unwritable_output(corpus, tmp_path):
    out = tmp_path / "no" / "such" / "dir" / "f.csv"
    assert main(["extract", "--data", str(corpus), "--out", str(out), "--jobs", "1"]) == 1


@pytest.mark.parametrize("kind", ["knn", "logreg", "forest", "mlp"])
def test_train_deterministic(kind, features_csv, tmp_path, capsys):
    sets = ["--set", "forest_n_estimators=20", "--set", "mlp_epochs=20", "--set", "mlp_hidden_layout=[16]"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["train", "--features", str(features_csv), "--model", kind, "--out", str(out), *sets]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("train accuracy: ") and lines[1].startswith("validation accuracy: ")
    meta = json.loads(a.read_text())["training_metadata"]
    assert meta["seed"] == 42 and meta["n_train"] == 24 and meta["n_val"] == 6


def test_train_single_class(tmp_path):
    rng = np.random.default_rng(2)
    (tmp_path / "data" / "solo").mkdir(parents=True)
    for i in range(4):
        write_wav(tmp_path / "data" / "solo" / f"{i}.wav", clip(300, rng))
    csv_path = tmp_path / "f.csv"
    assert main(["extract", "--data", str(tmp_path / "data"), "--out", str(csv_path), "--jobs", "1"]) == 0
    assert main(["train", "--features", str(csv_path), "--model", "logreg", "--out", str(tmp_path / "m")]) == 1


def test_train_schema_mismatch(features_csv, tmp_path):
    bad = tmp_path / "bad.csv"
    lines = features_csv.read_text().splitlines(keepends=True)
    bad.write_text(lines[0].replace("zcr_mean", "zcr_avg") + "".join(lines[1:]))
    assert main(["train", "--features", str(bad), "--model", "knn", "--out", str(tmp_path / "m")]) == 1


def test_predict_overfit_forest_and_mlp(corpus, features_csv, tmp_path, capsys):
    forest = tmp_path / "forest.json"
    main(["train", "--features", str(features_csv), "--model", "forest", "--out", str(forest),
          "--set", "forest_n_estimators=25"])
    mlp = tmp_path / "mlp.json"
    main(["train", "--features", str(features_csv), "--model", "mlp", "--out", str(mlp),
          "--set", "mlp_epochs=50", "--set", "mlp_hidden_layout=[16]"])
    capsys.readouterr()

    wav = corpus / "jazz" / "jazz.00003.wav"
    assert main(["predict", "--model", str(forest), str(wav)]) == 0
    assert capsys.readouterr().out.splitlines()[0] == "jazz"

    assert main(["predict", "--model", str(mlp), str(wav)]) == 0
    lines = capsys.readouterr().out.splitlines()
    probs = [float(l.split(":")[1]) for l in lines[1:]]
    assert [l.split(":")[0].strip() for l in lines[1:]] == sorted(GENRES)
    assert sum(probs) == pytest.approx(1.0, abs=1.5e-4 * len(probs))


def test_predict_errors(corpus, tmp_path, features_csv, capsys):
    wav = corpus / "blues" / "blues.00000.wav"
    assert main(["predict", "--model", str(tmp_path / "missing.json"), str(wav)]) == 1
    model = tmp_path / "knn.json"
    main(["train", "--features", str(features_csv), "--model", "knn", "--out", str(model)])
    bad = tmp_path / "bad.wav"
    bad.write_bytes(b"not audio")
    assert main(["predict", "--model", str(model), str(bad)]) == 1


def test_compare_outputs(features_csv, tmp_path, capsys):
    out = tmp_path / "report"
    args = ["compare", "--features", str(features_csv), "--out-dir", str(out),
            "--set", "forest_n_estimators=20", "--set", "mlp_epochs=30", "--set", "mlp_hidden_layout=[16]"]
    assert main(args) == 0
    first = capsys.readouterr().out
    doc = json.loads((out / "report.json").read_text())
    entries = doc["entries"]
    assert len(entries) == 4
    accs = [e["val_accuracy"] for e in entries]
    assert accs == sorted(accs, reverse=True)
    top = entries[0]["model_kind"]
    assert entries[0]["top"]
    rows = (out / f"confusion_{top}.csv").read_text().splitlines()[1:]
    assert [sum(map(int, r.split(",")[1:])) for r in rows] == [2, 2, 2]
    assert (out / f"confusion_{top}.svg").read_text().startswith("<svg")
    assert load_config(out / "config.toml").forest_n_estimators == 20
    assert len([l for l in first.splitlines() if l.startswith("| ")]) == 5

    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_compare_all_fail(features_csv, tmp_path):
    args = ["compare", "--features", str(features_csv), "--out-dir", str(tmp_path / "r"),
            "--models", "knn", "--set", "knn_k=1000"]
    assert main(args) == 1


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('seed = 7\nscaler = "minmax"\nknn_k = 3\n')
    cfg = load_config(path, {"knn_k": 9})
    assert (cfg.seed, cfg.scaler, cfg.knn_k) == (7, "minmax", 9)
    assert load_config(None) == RunConfig()


def test_config_round_trip(tmp_path):
    cfg = RunConfig().updated({"mlp_hidden_layout": (32, 16), "rolloff_p": 0.9})
    path = tmp_path / "c.toml"
    path.write_text(dump_config(cfg))
    assert load_config(path) == cfg


def test_config_rejects_bad_values(tmp_path):
    with pytest.raises(ConfigError):
        load_config(None, {"no_such_key": 1})
    with pytest.raises(ConfigError):
        load_config(None, {"knn_k": "five"})
    with pytest.raises(ConfigError):
        parse_assignment("missing_equals")
    path = tmp_path / "c.toml"
    path.write_text("[section]\nseed = 1\n")
    with pytest.raises(ConfigError):
        load_config(path)


def test_cli_unknown_key_exit_code(features_csv, tmp_path):
    args = ["train", "--features", str(features_csv), "--model", "knn", "--out", str(tmp_path / "m"),
            "--set", "bogus=1"]
    assert main(args) == 1


def test_flag_overrides_config(features_csv, tmp_path):
    cfgfile = tmp_path / "c.toml"
    cfgfile.write_text("seed = 1\n")
    out = tmp_path / "m.json"
    assert main(["train", "--features", str(features_csv), "--model", "knn", "--out", str(out),
                 "--config", str(cfgfile), "--seed", "5"]) == 0
    assert json.loads(out.read_text())["training_metadata"]["seed"] == 5
