"""Command-line interface tests.

Each test drives ``main`` in-process and checks exit codes and output
files.  Determinism is asserted byte for byte.
"""

import math
import os

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lfpdecode import fileio
from lfpdecode.cli import main
from lfpdecode.shrinkage import EllipsoidSpec, pinsker_mu


def run(*argv):
    return main(list(argv))


def read_bytes(path):
    with open(path, "rb") as handle:
        return handle.read()


SMALL_SYNTH = [
    "--classes", "3", "--trials-per-class", "4", "--channels", "2",
    "--samples", "64", "--sessions", "2", "--truncation", "3",
    "--sigma", "0.4", "--seed", "11",
]


def test_synth_writes_expected_row_count(tmp_path):
    out = str(tmp_path / "ds.csv")
    assert run("synth", "--out", out, *SMALL_SYNTH) == 0
    lines = open(out).read().splitlines()
    assert lines[0] == fileio.DATASET_HEADER
    assert len(lines) == 1 + 12 * 2 * 64  # header + trials*channels*samples
    meta = open(fileio.meta_path(out)).read()
    assert "n_trials=12" in meta and "sigma=0.4" in meta


def test_synth_rerun_is_byte_identical(tmp_path):
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    assert run("synth", "--out", a, *SMALL_SYNTH) == 0
    assert run("synth", "--out", b, *SMALL_SYNTH) == 0
    assert read_bytes(a) == read_bytes(b)
    assert read_bytes(fileio.meta_path(a)) == read_bytes(fileio.meta_path(b))


def test_synth_config_file_matches_flags(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "synth.classes = 3\nsynth.trials_per_class = 4\n"
        "synth.channels = 2\nsynth.samples = 64\nsynth.sessions = 2\n"
        "synth.truncation = 3\nnoise.sigma = 0.4\nseed = 11\n"
    )
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    assert run("synth", "--out", a, *SMALL_SYNTH) == 0
    assert run("synth", "--config", str(cfg), "--out", b) == 0
    assert read_bytes(a) == read_bytes(b)


def test_synth_impossible_separation_exits_2(tmp_path, capsys):
    out = str(tmp_path / "ds.csv")
    code = run("synth", "--out", out, "--separation", "50", "--seed", "0")
    assert code == 2
    err = capsys.readouterr().err
    assert "separation" in err
    assert not os.path.exists(out)


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("nope.nothing = 1\n")
    assert run("synth", "--config", str(cfg), "--out",
               str(tmp_path / "x.csv")) == 2
    assert "unknown config keys" in capsys.readouterr().err


def test_estimate_zero_signal_gives_zero_everywhere(tmp_path):
    sig = str(tmp_path / "sig.csv")
    fileio.write_signal(np.zeros(64), sig)
    out = str(tmp_path / "z")
    assert run("estimate", "--input", sig, "--out", out, "--method", "bjs") == 0
    table = np.loadtxt(out + "_coefficients.csv", delimiter=",", skiprows=1)
    assert_allclose(table[:, 1:], 0.0)
    recon = fileio.read_signal(out + "_reconstruction.csv")
    assert_allclose(recon, np.zeros(64))


def test_estimate_pinsker_shrinks_against_known_factor(tmp_path):
    # noiseless harmonic: y_5 = 3 exactly; the only change the estimator
    # makes is the water-filling factor on coordinate 5
    n = 256
    x = np.arange(n) / n
    f = 1.0 + 3.0 * math.sqrt(2.0) * np.sin(4.0 * math.pi * x)
    sig = str(tmp_path / "sig.csv")
    fileio.write_signal(f, sig)
    out = str(tmp_path / "p")
    assert run("estimate", "--input", sig, "--out", out, "--method", "pinsker",
               "--truncation", "3", "--alpha", "2.0", "--radius", "10.0") == 0
    table = np.loadtxt(out + "_coefficients.csv", delimiter=",", skiprows=1)
    spec = EllipsoidSpec(2.0, 10.0)
    mu = pinsker_mu(spec, 1.0 / math.sqrt(n))
    factor = max(0.0, 1.0 - 16.0 / mu)  # weight of the second sine harmonic
    assert_allclose(table[4, 1], 3.0, atol=1e-10)
    assert_allclose(table[4, 2], 3.0 * factor, rtol=1e-10)
    assert_allclose(table[0, 2], table[0, 1], rtol=1e-12)  # constant untouched


def test_estimate_bjs_passes_low_harmonics_through(tmp_path):
    # k=5 sits in a pass-through block, higher blocks carry nothing, so the
    # reconstruction reproduces the input signal
    n = 128
    x = np.arange(n) / n
    f = 1.0 + 3.0 * math.sqrt(2.0) * np.sin(4.0 * math.pi * x)
    sig = str(tmp_path / "sig.csv")
    fileio.write_signal(f, sig)
    out = str(tmp_path / "b")
    assert run("estimate", "--input", sig, "--out", out, "--method", "bjs") == 0
    recon = fileio.read_signal(out + "_reconstruction.csv")
    assert_allclose(recon, f, atol=1e-9)


def test_estimate_rerun_is_byte_identical(tmp_path):
    sig = str(tmp_path / "sig.csv")
    rng = np.random.default_rng(3)
    fileio.write_signal(rng.normal(size=64), sig)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    for out in (a, b):
        assert run("estimate", "--input", sig, "--out", out) == 0
    assert read_bytes(a + "_coefficients.csv") == read_bytes(b + "_coefficients.csv")
    assert read_bytes(a + "_reconstruction.csv") == read_bytes(b + "_reconstruction.csv")


def test_estimate_too_few_samples_exits_2(tmp_path, capsys):
    sig = str(tmp_path / "sig.csv")
    fileio.write_signal(np.ones(16), sig)
    assert run("estimate", "--input", sig, "--out", str(tmp_path / "o"),
               "--method", "pinsker", "--truncation", "4") == 2
    assert "frequency overflow" in capsys.readouterr().err


def test_benchmark_writes_report_confusion_summary(tmp_path):
    ds = str(tmp_path / "ds.csv")
    assert run("synth", "--out", ds, *SMALL_SYNTH) == 0
    out = str(tmp_path / "bench")
    assert run("benchmark", "--dataset", ds, "--out", out,
               "--pipeline", "bjs", "--components", "0") == 0
    confusion = np.loadtxt(out + "_confusion.csv", delimiter=",", skiprows=1)
    assert confusion[:, 0].tolist() == [1.0, 2.0, 3.0]
    assert confusion[:, 1:].sum() == 12  # every trial lands in one cell
    assert confusion[:, 1:].sum(axis=1).tolist() == [4.0, 4.0, 4.0]
    summary = open(out + "_summary.txt").read()
    assert "pipeline: bjs" in summary and "overall accuracy" in summary
    report = open(out + "_report.csv").read().splitlines()
    assert report[0] == "truncation,pattern,components,overall_accuracy"


def test_benchmark_grid_rows_cover_masks(tmp_path):
    ds = str(tmp_path / "ds.csv")
    assert run("synth", "--out", ds, *SMALL_SYNTH) == 0
    out = str(tmp_path / "grid")
    assert run("benchmark", "--dataset", ds, "--out", out,
               "--pipeline", "pinsker", "--grid", "--low-pass-only",
               "--truncations", "3", "--grid-components", "0") == 0
    rows = open(out + "_report.csv").read().splitlines()
    assert len(rows) == 1 + 7  # header + masks [1:1]..[1:7]


def test_benchmark_grid_with_bjs_exits_2(tmp_path, capsys):
    ds = str(tmp_path / "ds.csv")
    assert run("synth", "--out", ds, *SMALL_SYNTH) == 0
    assert run("benchmark", "--dataset", ds, "--out", str(tmp_path / "x"),
               "--pipeline", "bjs", "--grid") == 2
    assert "pinsker" in capsys.readouterr().err


def test_benchmark_missing_dataset_exits_2(tmp_path):
    assert run("benchmark", "--dataset", str(tmp_path / "nope.csv"),
               "--out", str(tmp_path / "x")) == 2


def test_unknown_experiment_name_exits_2(tmp_path, capsys):
    assert run("experiment", "--name", "bogus",
               "--out", str(tmp_path)) == 2
    err = capsys.readouterr().err
    assert "rates" in err and "phase" in err


def test_experiment_rates_outputs(tmp_path):
    out = str(tmp_path / "exp")
    assert run("experiment", "--name", "rates", "--out", out,
               "--epsilons", "0.5,0.2", "--trials", "100",
               "--thetas", "5") == 0
    rows = open(os.path.join(out, "rates.csv")).read().splitlines()
    assert rows[0] == "epsilon,risk,std_error,trials"
    assert len(rows) == 3
    summary = open(os.path.join(out, "rates_summary.txt")).read()
    assert "log-log slope" in summary


def test_experiment_rerun_is_byte_identical(tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    args = ["experiment", "--name", "rates", "--epsilons", "0.4,0.2",
            "--trials", "100", "--thetas", "4", "--seed", "3"]
    assert run(*args, "--out", a) == 0
    assert run(*args, "--out", b) == 0
    assert read_bytes(os.path.join(a, "rates.csv")) == \
        read_bytes(os.path.join(b, "rates.csv"))


def test_experiment_consistency_matches_library(tmp_path):
    from lfpdecode.experiments import consistency_experiment
    from lfpdecode.synth import NoiseModel, make_class_model

    out = str(tmp_path / "exp")
    assert run("experiment", "--name", "consistency", "--out", out,
               "--classes", "3", "--truncation", "3",
               "--sample-grid", "64,128", "--trials", "30", "--seed", "5") == 0
    table = np.loadtxt(os.path.join(out, "consistency.csv"),
                       delimiter=",", skiprows=1)
    model = make_class_model(3, EllipsoidSpec(2.0, 10.0), 3, 0.5, 0.1, seed=5)
    rows = consistency_experiment(model, [64, 128], 30, NoiseModel(1.0, 0),
                                  seed=5)
    assert_allclose(table[0], [64, rows[0].worst_class_error, rows[0].error_se,
                               rows[0].chebyshev_bound, rows[0].bound_se])


def test_missing_subcommand_exits_2(capsys):
    assert run() == 2
    capsys.readouterr()
