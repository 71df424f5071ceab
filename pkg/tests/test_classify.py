"""Classifier stack tests: decoder, PCA, LDA, pipelines, cross-validation.

PCA and LDA are checked against independent oracles (eigendecomposition of
the covariance, Gaussian log-density Bayes rule) rather than against their
own internals.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from lfpdecode.basis import CoefficientVector, basis_matrix, transform_rows
from lfpdecode.classify import (
    PipelineConfig,
    ShrinkageProfile,
    bjs_coefficient_count,
    bjs_pipeline_features,
    cross_validate,
    cross_validate_features,
    dataset_feature_matrix,
    grid_search,
    lda_predict,
    lda_train,
    magnitude_features,
    min_distance_decode,
    pca_apply,
    pca_fit,
    pinsker_pipeline_features,
    shrinkage_patterns,
)
from lfpdecode.shrinkage import EllipsoidSpec
from lfpdecode.synth import ClassModel, NoiseModel, generate_dataset, make_class_model

SPEC = EllipsoidSpec(2.0, 10.0)


def _toy_model(spread=0.3):
    # two prototypes per class, placed far apart by hand
    base = np.zeros(5)
    protos = (
        np.stack([base + [4.0, 0, 0, 0, 0], base + [4.0, 0.5, 0, 0, 0]]),
        np.stack([base - [4.0, 0, 0, 0, 0], base - [4.0, 0.5, 0, 0, 0]]),
        np.stack([base + [0, 2.0, 0, 0, 0], base + [0, 2.2, 0, 0, 0]]),
    )
    return ClassModel(protos, 1.0, spread, EllipsoidSpec(2.0, 50.0), 2)


def test_decoder_matches_brute_force():
    model = _toy_model()
    rng = np.random.default_rng(0)
    for _ in range(100):
        fhat = rng.normal(scale=3.0, size=5)
        dists = []
        for protos in model.prototypes:
            nearest = min(np.linalg.norm(fhat - p) for p in protos)
            dists.append(max(nearest - model.within_spread, 0.0))
        want = int(np.argmin(dists)) + 1
        got = min_distance_decode(CoefficientVector(fhat), model)
        assert got == want


def test_decoder_breaks_ties_toward_lowest_label():
    protos = (
        np.array([[1.0, 0.0, 0.0, 0.0, 0.0]]),
        np.array([[-1.0, 0.0, 0.0, 0.0, 0.0]]),
        np.array([[0.0, 9.0, 0.0, 0.0, 0.0]]),
    )
    model = ClassModel(protos, 0.4, 0.0, EllipsoidSpec(2.0, 50.0), 2)
    # the origin ties classes 1 and 2 and is far from class 3
    assert min_distance_decode(CoefficientVector(np.zeros(5)), model) == 1


def test_decoder_pads_shorter_estimates():
    model = _toy_model()
    short = CoefficientVector(np.array([4.0, 0.0]))
    assert min_distance_decode(short, model) == 1


def test_pca_matches_eigendecomposition():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(40, 6)) @ np.diag([5.0, 3.0, 2.0, 1.0, 0.5, 0.1])
    proj = pca_fit(x, 4)
    centered = x - x.mean(axis=0)
    cov = centered.T @ centered / (len(x) - 1)
    evals, evecs = np.linalg.eigh(cov)
    evals, evecs = evals[::-1], evecs[:, ::-1]
    assert_allclose(proj.explained_variance, evals[:4], rtol=1e-10)
    # components match up to sign
    for i in range(4):
        dot = abs(float(proj.components[i] @ evecs[:, i]))
        assert_allclose(dot, 1.0, rtol=1e-10)


def test_pca_components_are_orthonormal_and_sign_fixed():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(30, 5))
    proj = pca_fit(x, 3)
    assert_allclose(proj.components @ proj.components.T, np.eye(3), atol=1e-12)
    for row in proj.components:
        assert row[np.argmax(np.abs(row))] > 0.0


def test_pca_apply_reduces_dimension():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(20, 6))
    proj = pca_fit(x, 2)
    z = pca_apply(proj, x)
    assert z.shape == (20, 2)
    want = (x - proj.mean) @ proj.components.T
    assert_allclose(z, want, rtol=1e-12)


def test_pca_component_cap():
    rng = np.random.default_rng(4)
    x = rng.normal(size=(5, 8))
    with pytest.raises(ValueError):
        pca_fit(x, 5)  # only n-1 = 4 available
    with pytest.raises(ValueError):
        pca_fit(x, 0)


def test_lda_matches_gaussian_bayes_oracle():
    rng = np.random.default_rng(5)
    means = np.array([[0.0, 0.0], [3.0, 1.0], [-1.0, 4.0]])
    xs, ys = [], []
    for k, m in enumerate(means):
        xs.append(rng.normal(size=(30, 2)) + m)
        ys.append(np.full(30, k + 1))
    x = np.vstack(xs)
    y = np.concatenate(ys)
    ridge = 1e-8
    model = lda_train(x, y, ridge=ridge)

    # oracle: pooled-covariance Gaussian log densities + log priors
    mhat = np.stack([x[y == k].mean(axis=0) for k in (1, 2, 3)])
    scatter = sum(
        (x[y == k] - mhat[k - 1]).T @ (x[y == k] - mhat[k - 1]) for k in (1, 2, 3)
    )
    cov = scatter / (len(x) - 3) + ridge * np.eye(2)
    cov_inv = np.linalg.inv(cov)
    test_points = rng.normal(scale=3.0, size=(50, 2))
    want_scores = np.empty((50, 3))
    for k in range(3):
        diff = test_points - mhat[k]
        want_scores[:, k] = (
            -0.5 * np.einsum("ij,jk,ik->i", diff, cov_inv, diff) + np.log(1 / 3)
        )
    picks, scores = lda_predict(model, test_points)
    assert_allclose(picks, np.argmax(want_scores, axis=1) + 1)
    # scores differ from the oracle by a per-point constant only
    shifted = scores - scores[:, :1]
    want_shifted = want_scores - want_scores[:, :1]
    assert_allclose(shifted, want_shifted, atol=1e-6)


def test_lda_huge_ridge_degenerates_to_nearest_mean():
    rng = np.random.default_rng(6)
    x = rng.normal(size=(60, 3))
    y = np.repeat([1, 2, 3], 20)
    x[y == 2] += 4.0
    x[y == 3] -= 4.0
    model = lda_train(x, y, ridge=1e9)
    mhat = np.stack([x[y == k].mean(axis=0) for k in (1, 2, 3)])
    probes = rng.normal(scale=4.0, size=(40, 3))
    picks, _ = lda_predict(model, probes)
    want = np.argmin(
        ((probes[:, None, :] - mhat[None]) ** 2).sum(axis=2), axis=1
    ) + 1
    assert_allclose(picks, want)


def test_lda_requires_two_samples_per_class():
    x = np.vstack([np.zeros(3), np.ones(3), 2 * np.ones(3)])
    with pytest.raises(ValueError):
        lda_train(x, np.array([1, 1, 2]))


def test_lda_singular_covariance_without_ridge():
    rng = np.random.default_rng(7)
    flat = rng.normal(size=(20, 1)) @ np.ones((1, 4))  # rank-1 features
    y = np.repeat([1, 2], 10)
    with pytest.raises(ValueError, match="ridge"):
        lda_train(flat, y, ridge=0.0)


def test_lda_predict_single_vector():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(20, 2))
    y = np.repeat([1, 2], 10)
    x[y == 2] += 5.0
    model = lda_train(x, y)
    pick, scores = lda_predict(model, x[0])
    assert pick in (1, 2)
    assert scores.shape == (2,)


def test_magnitude_features_per_channel_blocks():
    # one channel of width 5: constant plus two (cos, sin) pairs
    row = np.array([[-1.5, 3.0, 4.0, 0.0, -2.0]])
    out = magnitude_features(row, 5)
    assert_allclose(out, [[1.5, 5.0, 0.0, 2.0, 0.0]])
    two = np.hstack([row, row])
    assert_allclose(magnitude_features(two, 5), np.hstack([out, out]))


def test_bjs_coefficient_count_values():
    assert bjs_coefficient_count(500) == 249
    assert bjs_coefficient_count(8) == 3
    assert bjs_coefficient_count(64) == 31
    # never more coefficients than samples
    assert bjs_coefficient_count(3) <= 3


def test_pinsker_features_match_manual_transform():
    model = make_class_model(3, SPEC, 3, 0.5, 0.1, seed=0)
    trial = generate_dataset(model, 1, 2, 64, 1, NoiseModel(0.3), seed=1).trials[0]
    factors = np.array([1.0, 1.0, 0.5, 0.25, 0.0])
    profile = ShrinkageProfile(factors, 2, label="test")
    config = PipelineConfig.pinsker(64, profile, components=0)
    feats = pinsker_pipeline_features(trial, config)
    manual = transform_rows(trial.channels, 2)[:, :5] * factors
    assert_allclose(feats, manual.reshape(-1), rtol=1e-12)


def test_bjs_features_have_partition_width():
    model = make_class_model(3, SPEC, 3, 0.5, 0.1, seed=0)
    trial = generate_dataset(model, 1, 2, 64, 1, NoiseModel(0.3), seed=1).trials[0]
    config = PipelineConfig.bjs(64, pass_limit=2, components=0)
    feats = bjs_pipeline_features(trial, config)
    assert feats.shape == (2 * config.channel_width,)
    assert config.channel_width == 63


def test_pipeline_config_validation():
    profile = ShrinkageProfile(np.ones(11), 5, label="full")
    with pytest.raises(ValueError):
        PipelineConfig.pinsker(20, profile)  # 2*(2T+1) = 22 > 20
    with pytest.raises(ValueError):
        ShrinkageProfile(np.array([0.5, 1.5]), 1)


def test_dataset_feature_matrix_stacks_trials():
    model = make_class_model(3, SPEC, 3, 0.5, 0.1, seed=2)
    ds = generate_dataset(model, 2, 2, 64, 1, NoiseModel(0.3), seed=3)
    profile = ShrinkageProfile(np.ones(7), 3, label="full")
    config = PipelineConfig.pinsker(64, profile, components=0)
    feats = dataset_feature_matrix(ds, config)
    assert feats.shape == (6, 14)
    for i, trial in enumerate(ds.trials):
        assert_allclose(feats[i], pinsker_pipeline_features(trial, config),
                        rtol=1e-12)


def _blob_features(rng, n_per_class=12, k=3, d=4, sep=6.0):
    xs, ys, gs = [], [], []
    for c in range(k):
        center = np.zeros(d)
        center[c % d] = sep * (c + 1)
        xs.append(rng.normal(size=(n_per_class, d)) + center)
        ys.append(np.full(n_per_class, c + 1))
        gs.append(np.arange(n_per_class) % 3 + 1)
    return np.vstack(xs), np.concatenate(ys), np.concatenate(gs)


def test_kfold_n_matches_leave_one_out():
    rng = np.random.default_rng(9)
    x, y, _ = _blob_features(rng)
    n = len(x)
    sessions = np.ones(n, dtype=int)
    report = cross_validate_features(x, y, sessions, 3, scheme=f"kfold:{n}")
    # manual leave-one-out
    hits = 0
    for i in range(n):
        mask = np.arange(n) != i
        model = lda_train(x[mask], y[mask])
        pick, _ = lda_predict(model, x[i])
        hits += int(pick == y[i])
    assert_allclose(report.overall_accuracy, hits / n)


def test_loso_needs_multiple_sessions():
    rng = np.random.default_rng(10)
    x, y, _ = _blob_features(rng)
    with pytest.raises(ValueError):
        cross_validate_features(x, y, np.ones(len(x), dtype=int), 3)


def test_unknown_scheme_rejected():
    rng = np.random.default_rng(11)
    x, y, g = _blob_features(rng)
    with pytest.raises(ValueError, match="loso"):
        cross_validate_features(x, y, g, 3, scheme="bootstrap")
    with pytest.raises(ValueError):
        cross_validate_features(x, y, g, 3, scheme="kfold:1")


def test_separable_blobs_reach_full_accuracy():
    rng = np.random.default_rng(12)
    x, y, g = _blob_features(rng, sep=10.0)
    report = cross_validate_features(x, y, g, 3, scheme="loso")
    assert report.overall_accuracy == 1.0
    assert report.confusion.shape == (3, 3)
    assert report.confusion.sum() == len(x)


def test_permuted_labels_fall_to_chance():
    rng = np.random.default_rng(13)
    x, y, g = _blob_features(rng, n_per_class=40, sep=8.0)
    y_perm = rng.permutation(y)
    report = cross_validate_features(x, y_perm, g, 3, scheme="loso")
    assert report.overall_accuracy < 0.5


def test_accuracy_is_rotation_invariant():
    rng = np.random.default_rng(14)
    x, y, g = _blob_features(rng, n_per_class=15, sep=5.0)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
    base = cross_validate_features(x, y, g, 3, scheme="loso", components=2)
    rotated = cross_validate_features(x @ q, y, g, 3, scheme="loso", components=2)
    assert_allclose(rotated.overall_accuracy, base.overall_accuracy, atol=1e-9)
    assert_allclose(rotated.confusion, base.confusion)


def test_components_capped_by_training_rank():
    rng = np.random.default_rng(15)
    x, y, g = _blob_features(rng, n_per_class=4, sep=8.0)
    report = cross_validate_features(x, y, g, 3, scheme="loso", components=30)
    assert any("capped" in note for note in report.notes)


def test_shrinkage_pattern_enumeration():
    patterns = shrinkage_patterns(2, low_pass_only=True)
    labels = [p.label for p in patterns]
    assert labels == [
        "mask[1:1]", "mask[1:2]", "mask[1:3]", "mask[1:4]", "mask[1:5]",
    ]
    full = shrinkage_patterns(2)
    assert len(full) == 15  # all contiguous [lo, hi] windows of 5 coords
    spec_patterns = shrinkage_patterns(2, spec=SPEC, mu_values=(30.0,))
    assert any("pinsker" in p.label for p in spec_patterns)
    with pytest.raises(ValueError):
        shrinkage_patterns(2, mu_values=(30.0,))


def test_grid_search_prefers_separating_band():
    # classes differ only in the first harmonic pair; masks that include
    # it should win over the pure-constant mask
    rng = np.random.default_rng(16)
    protos = []
    for k in range(3):
        theta = np.zeros(7)
        ang = 2.0 * np.pi * k / 3.0
        theta[1], theta[2] = 1.8 * np.cos(ang), 1.8 * np.sin(ang)
        protos.append(theta[None, :])
    model = ClassModel(tuple(protos), 1.0, 0.05, EllipsoidSpec(2.0, 60.0), 3)
    ds = generate_dataset(model, 6, 2, 64, 3, NoiseModel(sigma=0.5), seed=17)
    result = grid_search(ds, scheme="loso", truncations=(3,), components=(0,),
                         low_pass_only=True)
    assert result.best_accuracy >= 0.9
    assert result.best_config.label.startswith("pinsker[mask[1:")
    assert "mask[1:1]" not in result.best_config.label
    # rows cover the whole grid and the winner's accuracy matches its row
    assert len(result.rows) == 7
    best_rows = [r for r in result.rows if r.accuracy == result.best_accuracy]
    assert best_rows[0].pattern in result.best_config.label


def test_grid_search_empty_grid_rejected():
    model = _toy_model()
    ds = generate_dataset(model, 2, 1, 64, 2, NoiseModel(0.2), seed=18)
    with pytest.raises(ValueError, match="empty grid"):
        grid_search(ds, truncations=(), components=(0,))


def test_cross_validate_dataset_end_to_end_deterministic():
    model = make_class_model(3, SPEC, 3, 0.6, 0.05, seed=20)
    ds = generate_dataset(model, 4, 2, 64, 2, NoiseModel(sigma=0.4), seed=21)
    config = PipelineConfig.bjs(64, pass_limit=2, components=0)
    r1 = cross_validate(ds, config, scheme="loso")
    r2 = cross_validate(ds, config, scheme="loso")
    assert r1.overall_accuracy == r2.overall_accuracy
    assert_allclose(r1.confusion, r2.confusion)
