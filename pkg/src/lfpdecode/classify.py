"""Classification of multichannel trials from shrunken basis coefficients.

Two feature pipelines (linear minimax shrinkage with a configurable factor
profile, and parameter-free blockwise James-Stein) feed an optional PCA
reduction and a regularized LDA.  A minimum-distance decoder over a class
geometry, session-aware cross-validation, and a shrinkage-profile grid
search complete the module.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .basis import CoefficientVector, transform_rows
from .shrinkage import (
    BlockPartition,
    EllipsoidSpec,
    _bjs_rows,
    dyadic_blocks,
    pinsker_weights,
)
from .synth import ClassModel, LabeledDataset, Trial

__all__ = [
    "ShrinkageProfile",
    "PCAProjection",
    "LDAModel",
    "PipelineConfig",
    "CrossValReport",
    "GridRow",
    "GridSearchResult",
    "bjs_coefficient_count",
    "min_distance_decode",
    "pca_fit",
    "pca_apply",
    "lda_train",
    "lda_predict",
    "magnitude_features",
    "pinsker_pipeline_features",
    "bjs_pipeline_features",
    "dataset_feature_matrix",
    "cross_validate",
    "cross_validate_features",
    "shrinkage_patterns",
    "grid_search",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShrinkageProfile:
    """Per-coefficient shrinkage factors applied after the forward transform.

    ``truncation`` fixes how many coefficients are computed (2T+1); the
    first ``len(factors)`` of them are kept and multiplied by ``factors``,
    the rest are dropped.  Factors live in [0, 1].
    """

    factors: np.ndarray
    truncation: int
    label: str = "custom"

    def __post_init__(self) -> None:
        factors = np.asarray(self.factors, dtype=float)
        if factors.ndim != 1 or factors.size < 1:
            raise ValueError("factors must be a nonempty 1-D vector")
        if np.any(factors < 0.0) or np.any(factors > 1.0):
            raise ValueError("shrinkage factors must lie in [0, 1]")
        if self.truncation < 1:
            raise ValueError("truncation must be at least 1")
        if factors.size > 2 * self.truncation + 1:
            raise ValueError("profile longer than the computed 2T+1 coefficients")
        object.__setattr__(self, "factors", factors)


@dataclass(frozen=True)
class PCAProjection:
    """Mean-centered projection onto the top principal components."""

    mean: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray

    def __post_init__(self) -> None:
        comps = np.asarray(self.components, dtype=float)
        var = np.asarray(self.explained_variance, dtype=float)
        gram = comps @ comps.T
        if not np.allclose(gram, np.eye(comps.shape[0]), atol=1e-8):
            raise ValueError("component rows must be orthonormal")
        if np.any(var < -1e-12) or np.any(np.diff(var) > 1e-12):
            raise ValueError("explained variances must be nonnegative, nonincreasing")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "explained_variance", var)
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=float))

    @property
    def n_components(self) -> int:
        return int(self.components.shape[0])


@dataclass(frozen=True)
class LDAModel:
    """Gaussian LDA with a shared (ridge-regularized) covariance.

    ``coef``/``intercept`` cache the linear discriminants
    delta_k(x) = x' Sigma^-1 mu_k - mu_k' Sigma^-1 mu_k / 2 + log pi_k.
    """

    class_ids: np.ndarray
    means: np.ndarray
    covariance: np.ndarray
    priors: np.ndarray
    ridge: float
    coef: np.ndarray
    intercept: np.ndarray


def bjs_coefficient_count(n_samples: int) -> int:
    """Widest odd coefficient count that stays below the grid's safe band.

    Equals min(N, 2*floor((N/2 - 1)/2) + 1), the largest 2T+1 satisfying
    the forward transform's 2T+1 < N/2 requirement.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    return min(n_samples, 2 * ((n_samples // 2 - 1) // 2) + 1)


# ---------------------------------------------------------------------------
# minimum-distance decoding


def _class_distances(rows: np.ndarray, model: ClassModel) -> np.ndarray:
    """Distance from each row to each class set, (n, n_classes).

    Distance to a class is the smallest distance to one of its prototypes
    minus within_spread, floored at zero; vectors are zero-padded to a
    common width.
    """
    width = rows.shape[1]
    for protos in model.prototypes:
        width = max(width, protos.shape[1])
    padded = np.zeros((rows.shape[0], width))
    padded[:, : rows.shape[1]] = rows
    out = np.empty((rows.shape[0], model.n_classes))
    for k, protos in enumerate(model.prototypes):
        p = np.zeros((protos.shape[0], width))
        p[:, : protos.shape[1]] = protos
        d2 = (
            (padded**2).sum(axis=1)[:, None]
            - 2.0 * padded @ p.T
            + (p**2).sum(axis=1)[None, :]
        )
        nearest = np.sqrt(np.clip(d2, 0.0, None)).min(axis=1)
        out[:, k] = np.clip(nearest - model.within_spread, 0.0, None)
    return out


def _decode_rows(rows: np.ndarray, model: ClassModel) -> np.ndarray:
    """Batched minimum-distance decoding; ties go to the lowest class id."""
    return _class_distances(rows, model).argmin(axis=1) + 1


def min_distance_decode(fhat: CoefficientVector, model: ClassModel) -> int:
    """Decode a coefficient vector to the nearest class set.

    Returns the 1-based class id minimizing the spread-adjusted distance;
    exact ties resolve to the lowest id.
    """
    return int(_decode_rows(fhat.coeffs[None, :], model)[0])


# ---------------------------------------------------------------------------
# PCA


def pca_fit(features, n_components: int) -> PCAProjection:
    """Fit a PCA projection on a (n_samples, dim) feature matrix.

    ``n_components`` must not exceed min(n_samples - 1, dim).  Component
    signs are fixed so each one's largest-magnitude loading is positive,
    making the fit deterministic.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("features must be a 2-D matrix with at least 2 rows")
    n, dim = X.shape
    cap = min(n - 1, dim)
    if not 1 <= n_components <= cap:
        raise ValueError(
            f"n_components must lie in [1, min(n_samples-1, dim)] = [1, {cap}]"
        )
    mean = X.mean(axis=0)
    _, svals, vt = np.linalg.svd(X - mean, full_matrices=False)
    comps = vt[:n_components].copy()
    for row in comps:
        peak = np.argmax(np.abs(row))
        if row[peak] < 0.0:
            row *= -1.0
    variance = svals[:n_components] ** 2 / (n - 1)
    return PCAProjection(mean=mean, components=comps, explained_variance=variance)


def pca_apply(projection: PCAProjection, features) -> np.ndarray:
    """Center features with the fitted mean and project onto the components."""
    X = np.asarray(features, dtype=float)
    return (X - projection.mean) @ projection.components.T


# ---------------------------------------------------------------------------
# LDA


def lda_train(features, labels, ridge: float | None = None) -> LDAModel:
    """Train LDA with pooled within-class covariance plus a ridge.

    ``ridge`` is added to the diagonal; None selects the default
    1e-6 * trace/dim.  An explicit ridge of 0 on a singular covariance
    raises instead of silently producing garbage.

    Requires at least 2 classes and at least 2 samples in each.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("features must be (n_samples, dim) matching labels")
    n, dim = X.shape
    class_ids, counts = np.unique(y, return_counts=True)
    if class_ids.size < 2:
        raise ValueError("LDA needs at least 2 classes")
    if np.any(counts < 2):
        raise ValueError("every class needs at least 2 training samples")
    means = np.vstack([X[y == c].mean(axis=0) for c in class_ids])
    scatter = np.zeros((dim, dim))
    for c, m in zip(class_ids, means):
        centered = X[y == c] - m
        scatter += centered.T @ centered
    pooled = scatter / (n - class_ids.size)
    if ridge is None:
        lam = 1e-6 * float(np.trace(pooled)) / dim
    else:
        if ridge < 0.0 or not np.isfinite(ridge):
            raise ValueError("ridge must be finite and nonnegative")
        lam = float(ridge)
    cov = pooled + lam * np.eye(dim)
    try:
        np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        raise ValueError(
            "pooled covariance is singular; pass a positive ridge or reduce "
            "the feature dimension with PCA"
        ) from None
    priors = counts / n
    coef = np.linalg.solve(cov, means.T)
    intercept = -0.5 * np.einsum("kd,dk->k", means, coef) + np.log(priors)
    return LDAModel(
        class_ids=class_ids,
        means=means,
        covariance=cov,
        priors=priors,
        ridge=lam,
        coef=coef,
        intercept=intercept,
    )


def lda_predict(model: LDAModel, features):
    """Predict class ids and return the per-class discriminant scores.

    Accepts a single feature vector or a (n, dim) matrix.  Score ties
    resolve to the lowest class id.
    """
    X = np.asarray(features, dtype=float)
    single = X.ndim == 1
    scores = np.atleast_2d(X) @ model.coef + model.intercept
    picks = model.class_ids[scores.argmax(axis=1)]
    if single:
        return int(picks[0]), scores[0]
    return picks, scores


# ---------------------------------------------------------------------------
# feature pipelines


@dataclass(frozen=True)
class PipelineConfig:
    """Everything a feature pipeline plus classifier needs.

    ``shrinkage`` selects the pipeline: a :class:`ShrinkageProfile` runs
    the linear-minimax (profile) pipeline on 2T+1 coefficients, a
    :class:`BlockPartition` runs the blockwise James-Stein pipeline on the
    widest safe band.  ``components`` = 0 skips PCA.  ``ridge`` = None
    uses the LDA default.
    """

    n_samples: int
    shrinkage: ShrinkageProfile | BlockPartition
    components: int = 0
    ridge: float | None = None
    magnitude_only: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if self.components < 0:
            raise ValueError("components must be nonnegative (0 skips PCA)")
        if isinstance(self.shrinkage, ShrinkageProfile):
            if 2 * (2 * self.shrinkage.truncation + 1) >= self.n_samples:
                raise ValueError("2T+1 must stay below n_samples/2")
        elif not isinstance(self.shrinkage, BlockPartition):
            raise TypeError("shrinkage must be a ShrinkageProfile or BlockPartition")

    @classmethod
    def pinsker(
        cls,
        n_samples: int,
        profile: ShrinkageProfile,
        components: int = 0,
        ridge: float | None = None,
        magnitude_only: bool = False,
        seed: int = 0,
    ) -> "PipelineConfig":
        return cls(
            n_samples=n_samples,
            shrinkage=profile,
            components=components,
            ridge=ridge,
            magnitude_only=magnitude_only,
            seed=seed,
        )

    @classmethod
    def bjs(
        cls,
        n_samples: int,
        pass_limit: int = 2,
        components: int = 0,
        ridge: float | None = None,
        magnitude_only: bool = False,
        seed: int = 0,
    ) -> "PipelineConfig":
        """Blockwise James-Stein pipeline with zero cutoff at floor(log2 N)."""
        zero_limit = int(np.floor(np.log2(n_samples)))
        partition = dyadic_blocks(pass_limit, zero_limit)
        return cls(
            n_samples=n_samples,
            shrinkage=partition,
            components=components,
            ridge=ridge,
            magnitude_only=magnitude_only,
            seed=seed,
        )

    @property
    def channel_width(self) -> int:
        """Feature length contributed by one channel."""
        if isinstance(self.shrinkage, ShrinkageProfile):
            return int(self.shrinkage.factors.size)
        return self.shrinkage.width

    @property
    def label(self) -> str:
        if isinstance(self.shrinkage, ShrinkageProfile):
            head = f"pinsker[{self.shrinkage.label}] T={self.shrinkage.truncation}"
        else:
            head = (
                f"bjs[L={self.shrinkage.pass_limit},J={self.shrinkage.zero_limit}]"
            )
        tail = f" P={self.components}" if self.components else ""
        if self.magnitude_only:
            tail += " magnitude-only"
        return head + tail


def magnitude_features(features, channel_width: int) -> np.ndarray:
    """Collapse each harmonic pair to (magnitude, 0) within channel blocks.

    The first coefficient of each channel block becomes its absolute
    value; every following (cos, sin) pair becomes (sqrt(cos^2+sin^2), 0).
    Rotating any pair of the input leaves the output unchanged.
    """
    X = np.asarray(features, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] % channel_width != 0:
        raise ValueError("feature width is not a multiple of channel_width")
    blocks = X.reshape(X.shape[0], -1, channel_width)
    out = np.zeros_like(blocks)
    out[:, :, 0] = np.abs(blocks[:, :, 0])
    pairs = (channel_width - 1) // 2
    if pairs:
        cos = blocks[:, :, 1 : 2 * pairs : 2]
        sin = blocks[:, :, 2 : 2 * pairs + 1 : 2]
        out[:, :, 1 : 2 * pairs : 2] = np.hypot(cos, sin)
    if channel_width % 2 == 0:
        out[:, :, -1] = np.abs(blocks[:, :, -1])
    flat = out.reshape(X.shape[0], -1)
    return flat[0] if single else flat


def _channel_feature_rows(rows: np.ndarray, config: PipelineConfig) -> np.ndarray:
    """Shrunken coefficients for a stack of raw channel rows, (m, width)."""
    if rows.shape[1] < config.n_samples:
        raise ValueError("trials are shorter than the configured n_samples")
    rows = rows[:, : config.n_samples]
    if isinstance(config.shrinkage, ShrinkageProfile):
        profile = config.shrinkage
        coeffs = transform_rows(rows, profile.truncation)
        return coeffs[:, : profile.factors.size] * profile.factors
    partition = config.shrinkage
    count = bjs_coefficient_count(config.n_samples)
    coeffs = transform_rows(rows, (count - 1) // 2)
    padded = np.zeros((rows.shape[0], partition.width))
    padded[:, :count] = coeffs
    return _bjs_rows(padded, partition, 1.0 / np.sqrt(config.n_samples))


def _trial_features(
    trial: Trial, config: PipelineConfig, projection: PCAProjection | None
) -> np.ndarray:
    per_channel = _channel_feature_rows(trial.channels, config)
    flat = per_channel.reshape(-1)
    if config.magnitude_only:
        flat = magnitude_features(flat, config.channel_width)
    if projection is not None:
        flat = pca_apply(projection, flat)
    return flat


def pinsker_pipeline_features(
    trial: Trial, config: PipelineConfig, projection: PCAProjection | None = None
) -> np.ndarray:
    """Concatenated profile-shrunk coefficients of all channels.

    Applies the configured factor profile per channel, concatenates, and
    optionally applies a fitted PCA projection.
    """
    if not isinstance(config.shrinkage, ShrinkageProfile):
        raise ValueError("config does not describe the profile pipeline")
    return _trial_features(trial, config, projection)


def bjs_pipeline_features(
    trial: Trial, config: PipelineConfig, projection: PCAProjection | None = None
) -> np.ndarray:
    """Concatenated blockwise-James-Stein coefficients of all channels.

    Each channel is expanded to the widest safe band (see
    :func:`bjs_coefficient_count`), shrunk blockwise with noise level
    1/sqrt(N), zero-padded to the partition width, and concatenated.
    """
    if not isinstance(config.shrinkage, BlockPartition):
        raise ValueError("config does not describe the blockwise pipeline")
    return _trial_features(trial, config, projection)


def dataset_feature_matrix(dataset: LabeledDataset, config: PipelineConfig) -> np.ndarray:
    """Pre-PCA feature matrix for a whole dataset, (n_trials, dim)."""
    stacked = np.vstack([t.channels for t in dataset.trials])
    per_channel = _channel_feature_rows(stacked, config)
    feats = per_channel.reshape(dataset.n_trials, -1)
    if config.magnitude_only:
        feats = magnitude_features(feats, config.channel_width)
    return feats


# ---------------------------------------------------------------------------
# cross-validation


@dataclass
class CrossValReport:
    """Pooled cross-validation outcome: confusion rows are true classes."""

    overall_accuracy: float
    confusion: np.ndarray
    per_class_accuracy: np.ndarray
    n_trials: int
    scheme: str
    notes: list[str] = field(default_factory=list)

    @property
    def worst_class_error(self) -> float:
        seen = self.confusion.sum(axis=1) > 0
        return float((1.0 - self.per_class_accuracy[seen]).max())


def _parse_scheme(scheme: str, n_trials: int, sessions: np.ndarray):
    if scheme == "loso":
        ids = np.unique(sessions)
        if ids.size < 2:
            raise ValueError("leave-one-session-out needs at least 2 sessions")
        return [(f"session {s}", sessions == s) for s in ids]
    if scheme.startswith("kfold:"):
        k = int(scheme.split(":", 1)[1])
        if not 2 <= k <= n_trials:
            raise ValueError("kfold needs 2 <= k <= n_trials")
        idx = np.arange(n_trials)
        return [(f"fold {f}", idx % k == f) for f in range(k)]
    raise ValueError(f"unknown scheme {scheme!r}; use 'loso' or 'kfold:<k>'")


def cross_validate_features(
    features,
    labels,
    sessions,
    n_classes: int,
    scheme: str = "loso",
    components: int = 0,
    ridge: float | None = None,
) -> CrossValReport:
    """Cross-validate PCA + LDA on precomputed features.

    PCA and LDA are fit on the training folds only.  The requested
    component count is capped at the training-fold rank (with a note) and
    a fold whose training part misses a class trains on the remaining
    classes, again with a note.
    """
    X = np.asarray(features, dtype=float)
    y = np.asarray(labels, dtype=int)
    sess = np.asarray(sessions, dtype=int)
    folds = _parse_scheme(scheme, y.size, sess)
    confusion = np.zeros((n_classes, n_classes), dtype=int)
    notes: list[str] = []
    for name, test_mask in folds:
        train_mask = ~test_mask
        Xtr, ytr = X[train_mask], y[train_mask]
        Xte, yte = X[test_mask], y[test_mask]
        missing = sorted(set(range(1, n_classes + 1)) - set(ytr.tolist()))
        if missing:
            msg = f"{name}: classes {missing} absent from training; skipped there"
            logger.warning(msg)
            notes.append(msg)
        if components > 0:
            cap = min(components, Xtr.shape[0] - 1, Xtr.shape[1])
            if cap < components:
                msg = f"{name}: components capped at {cap} (rank limit)"
                logger.warning(msg)
                notes.append(msg)
            projection = pca_fit(Xtr, cap)
            Xtr = pca_apply(projection, Xtr)
            Xte = pca_apply(projection, Xte)
        model = lda_train(Xtr, ytr, ridge)
        picks, _ = lda_predict(model, Xte)
        for truth, pick in zip(yte, picks):
            confusion[truth - 1, pick - 1] += 1
    total = int(confusion.sum())
    overall = float(np.trace(confusion)) / total
    row_sums = confusion.sum(axis=1)
    per_class = np.divide(
        np.diag(confusion),
        row_sums,
        out=np.zeros(n_classes, dtype=float),
        where=row_sums > 0,
    )
    return CrossValReport(
        overall_accuracy=overall,
        confusion=confusion,
        per_class_accuracy=per_class,
        n_trials=total,
        scheme=scheme,
        notes=notes,
    )


def cross_validate(
    dataset: LabeledDataset, config: PipelineConfig, scheme: str = "loso"
) -> CrossValReport:
    """Feature extraction plus :func:`cross_validate_features` on a dataset."""
    features = dataset_feature_matrix(dataset, config)
    return cross_validate_features(
        features,
        dataset.labels(),
        dataset.session_ids(),
        dataset.n_classes,
        scheme=scheme,
        components=config.components,
        ridge=config.ridge,
    )


# ---------------------------------------------------------------------------
# grid search


@dataclass(frozen=True)
class GridRow:
    truncation: int
    pattern: str
    components: int
    accuracy: float


@dataclass
class GridSearchResult:
    best_config: PipelineConfig
    best_accuracy: float
    rows: list[GridRow]


def shrinkage_patterns(
    truncation: int,
    spec: EllipsoidSpec | None = None,
    mu_values=(),
    low_pass_only: bool = False,
) -> list[ShrinkageProfile]:
    """Candidate factor profiles for the grid search.

    Binary masks keep a contiguous index range [lo, hi] of the 2T+1
    coefficients (all of them, or only the low-pass lo = 1 family), and
    each requested water-filling level adds the corresponding linear
    minimax profile (``spec`` required for those).
    """
    count = 2 * truncation + 1
    patterns = []
    for lo in range(1, count + 1):
        for hi in range(lo, count + 1):
            factors = np.zeros(count)
            factors[lo - 1 : hi] = 1.0
            patterns.append(
                ShrinkageProfile(factors, truncation, label=f"mask[{lo}:{hi}]")
            )
        if low_pass_only:
            break
    if len(mu_values) and spec is None:
        raise ValueError("mu_values require an ellipsoid spec")
    for mu in mu_values:
        factors = pinsker_weights(spec, float(mu), count)
        patterns.append(
            ShrinkageProfile(factors, truncation, label=f"pinsker(mu={mu:g})")
        )
    return patterns


def grid_search(
    dataset: LabeledDataset,
    scheme: str = "loso",
    truncations=(5,),
    components=(0,),
    patterns=None,
    spec: EllipsoidSpec | None = None,
    mu_values=(),
    ridge: float | None = None,
    low_pass_only: bool = False,
) -> GridSearchResult:
    """Exhaustive search over (truncation, factor profile, components).

    Profiles default to :func:`shrinkage_patterns` per truncation.  The
    grid is scanned in lexicographic order and ties keep the earliest
    configuration, so results are reproducible.
    """
    best: PipelineConfig | None = None
    best_acc = -1.0
    rows: list[GridRow] = []
    for truncation in truncations:
        if patterns is None:
            candidates = shrinkage_patterns(
                truncation, spec=spec, mu_values=mu_values, low_pass_only=low_pass_only
            )
        else:
            candidates = [p for p in patterns if p.truncation == truncation]
        for profile in candidates:
            for n_comp in components:
                config = PipelineConfig.pinsker(
                    n_samples=dataset.n_samples,
                    profile=profile,
                    components=int(n_comp),
                    ridge=ridge,
                )
                report = cross_validate(dataset, config, scheme=scheme)
                rows.append(
                    GridRow(
                        truncation=truncation,
                        pattern=profile.label,
                        components=int(n_comp),
                        accuracy=report.overall_accuracy,
                    )
                )
                if report.overall_accuracy > best_acc:
                    best_acc = report.overall_accuracy
                    best = config
    if best is None:
        raise ValueError("empty grid")
    return GridSearchResult(best_config=best, best_accuracy=best_acc, rows=rows)
