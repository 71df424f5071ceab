"""File format round-trip tests."""

import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lfpdecode import fileio
from lfpdecode.shrinkage import EllipsoidSpec
from lfpdecode.synth import NoiseModel, generate_dataset, make_class_model


def test_float_formatting_roundtrips_exactly():
    rng = np.random.default_rng(0)
    values = list(rng.normal(size=50)) + [1e-300, 1e300, 0.1, -0.0, 3.0]
    for x in values:
        assert float(fileio.fmt_float(x)) == float(x)


def test_cell_formatting_rules():
    assert fileio._cell(3) == "3"
    assert fileio._cell(np.int64(5)) == "5"
    assert fileio._cell("abc") == "abc"
    with pytest.raises(TypeError):
        fileio._cell(True)


def test_atomic_write_replaces_content(tmp_path):
    path = tmp_path / "x.txt"
    fileio.atomic_write_text(str(path), "one\n")
    fileio.atomic_write_text(str(path), "two\n")
    assert path.read_text() == "two\n"
    # no stray temp files left behind
    assert os.listdir(tmp_path) == ["x.txt"]


def test_dataset_roundtrip(tmp_path):
    model = make_class_model(3, EllipsoidSpec(2.0, 10.0), 3, 0.5, 0.1, seed=0)
    ds = generate_dataset(model, 2, 2, 32, 2, NoiseModel(sigma=0.3), seed=1)
    path = str(tmp_path / "ds.csv")
    fileio.write_dataset(ds, path)
    back = fileio.read_dataset(path)
    assert back.n_trials == ds.n_trials
    assert back.n_classes == ds.n_classes
    for ta, tb in zip(ds.trials, back.trials):
        assert_allclose(tb.channels, ta.channels)  # exact via 17-digit floats
        assert tb.label == ta.label and tb.session == ta.session
    assert back.params["sigma"] == 0.3
    assert back.params["alpha"] == 2.0


def test_dataset_requires_sidecar(tmp_path):
    model = make_class_model(3, EllipsoidSpec(2.0, 10.0), 3, 0.5, 0.1, seed=0)
    ds = generate_dataset(model, 1, 1, 32, 1, NoiseModel(sigma=0.3), seed=1)
    path = str(tmp_path / "ds.csv")
    fileio.write_dataset(ds, path)
    os.remove(fileio.meta_path(path))
    with pytest.raises(ValueError, match="sidecar"):
        fileio.read_dataset(path)


def test_dataset_header_checked(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("wrong,header\n0,1\n")
    with pytest.raises(ValueError, match="header"):
        fileio.read_dataset(str(path))


def test_signal_roundtrip(tmp_path):
    rng = np.random.default_rng(2)
    samples = rng.normal(size=64)
    path = str(tmp_path / "sig.csv")
    fileio.write_signal(samples, path)
    back = fileio.read_signal(path)
    assert_allclose(back, samples)


def test_signal_index_coverage_checked(tmp_path):
    path = tmp_path / "sig.csv"
    path.write_text("sample_index,value\n0,1.0\n2,2.0\n")
    with pytest.raises(ValueError):
        fileio.read_signal(str(path))


def test_config_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(
        "# comment line\n"
        "\n"
        "synth.classes = 8\n"
        "noise.sigma=1.5\n"
        "label = phase coded \n"
    )
    cfg = fileio.read_config(str(path))
    assert cfg == {
        "synth.classes": "8",
        "noise.sigma": "1.5",
        "label": "phase coded",
    }


def test_config_rejects_duplicates_and_garbage(tmp_path):
    dup = tmp_path / "dup.cfg"
    dup.write_text("a = 1\na = 2\n")
    with pytest.raises(ValueError, match="duplicate"):
        fileio.read_config(str(dup))
    bad = tmp_path / "bad.cfg"
    bad.write_text("just some words\n")
    with pytest.raises(ValueError):
        fileio.read_config(str(bad))


def test_write_table(tmp_path):
    path = str(tmp_path / "t.csv")
    fileio.write_table(path, ["a", "b"], [(1, 0.5), (2, 0.25)])
    lines = open(path).read().splitlines()
    assert lines[0] == "a,b"
    assert lines[1] == "1,0.5"
