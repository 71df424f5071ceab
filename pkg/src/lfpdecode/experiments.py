"""Monte-Carlo experiments: worst-case risk curves, adaptivity of blockwise
James-Stein against the oracle linear minimax estimator, decoder consistency,
classifier benchmarks, and the phase-information ablation.

Every Monte-Carlo quantity is reported with its standard error and every
experiment is a pure function of its arguments, including the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .basis import CoefficientVector, basis_matrix, coeff_l2_distance, transform_rows
from .classify import (
    CrossValReport,
    PipelineConfig,
    _decode_rows,
    bjs_coefficient_count,
    cross_validate,
)
from .shrinkage import (
    EllipsoidSpec,
    _bjs_rows,
    dyadic_blocks,
    ellipsoid_weights,
    pinsker_mu,
    pinsker_weights,
)
from .synth import ClassModel, NoiseModel, _rng, perturb_within_class

__all__ = [
    "RiskPoint",
    "RiskCurve",
    "AdaptivityRow",
    "ConsistencyRow",
    "BenchmarkReport",
    "PhaseAblationResult",
    "mse_function",
    "risk_curve_pinsker",
    "adaptivity_ratio_bjs",
    "consistency_experiment",
    "benchmark_classifiers",
    "phase_ablation",
]


def mse_function(f_true: CoefficientVector, f_est: CoefficientVector) -> float:
    """Squared L2([0,1]) distance between the represented functions."""
    return coeff_l2_distance(f_true, f_est) ** 2


@dataclass(frozen=True)
class RiskPoint:
    """One abscissa of a risk curve with its Monte-Carlo standard error."""

    epsilon: float
    risk: float
    std_error: float
    trials: int


@dataclass
class RiskCurve:
    """Worst-case risk estimates over a decreasing noise grid."""

    points: list[RiskPoint]

    def __post_init__(self) -> None:
        if not self.points:
            raise ValueError("a risk curve needs at least one point")
        eps = [p.epsilon for p in self.points]
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("points must be sorted by strictly decreasing epsilon")
        for p in self.points:
            if p.trials < 100:
                raise ValueError("risk points need at least 100 trials")
            if p.risk <= 0.0:
                raise ValueError("risk estimates must be positive")


def _boundary_thetas(
    spec: EllipsoidSpec, dim: int, n_random: int, rng: np.random.Generator
) -> np.ndarray:
    """Boundary-heavy parameter sample for sup-risk estimation.

    Mixes single-coordinate extreme points radius/a_k * e_k with random
    directions rescaled onto the ellipsoid boundary.  The unconstrained
    first coordinate rides along at whatever the direction gave it.
    """
    a = ellipsoid_weights(spec, dim)
    rows = []
    vertex_ks = sorted(
        {int(k) for k in np.unique(np.geomspace(2, dim, num=min(dim - 1, 24)))}
    )
    for k in vertex_ks:
        theta = np.zeros(dim)
        theta[k - 1] = spec.radius / a[k - 1]
        rows.append(theta)
    damp = np.maximum(a, 1.0)
    for _ in range(n_random):
        draw = rng.standard_normal(dim) / damp
        weighted = float(np.sum(a**2 * draw**2))
        if weighted > 0.0:
            draw *= spec.radius / np.sqrt(weighted)
        rows.append(draw)
    return np.vstack(rows)


def _sup_risk(errors_by_theta):
    """Pick the largest mean risk and its standard error from per-theta draws."""
    best_mean, best_se = -np.inf, 0.0
    for err in errors_by_theta:
        mean = float(err.mean())
        if mean > best_mean:
            best_mean = mean
            best_se = float(err.std(ddof=1) / np.sqrt(err.size))
    return best_mean, best_se


def risk_curve_pinsker(
    spec: EllipsoidSpec,
    epsilons,
    trials: int,
    seed: int = 0,
    n_thetas: int = 50,
) -> RiskCurve:
    """Empirical worst-case risk of the exact linear minimax estimator.

    For each noise level the water-filling weights are recomputed and the
    risk is maximized over a boundary-heavy sample of parameters, at least
    ``n_thetas`` random ones plus coordinate extremes.

    Parameters
    ----------
    epsilons : sequence of float, strictly decreasing.
    trials : int
        Noise draws per parameter, at least 100.
    """
    eps_list = [float(e) for e in epsilons]
    if any(e <= 0.0 for e in eps_list):
        raise ValueError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilons must be strictly decreasing")
    if trials < 100:
        raise ValueError("trials must be at least 100")
    points = []
    for i, eps in enumerate(eps_list):
        mu = pinsker_mu(spec, eps)
        pairs = int(np.floor(mu ** (1.0 / spec.alpha) / 2.0)) + 1
        dim = 2 * pairs + 9
        weights = pinsker_weights(spec, mu, dim)
        rng = _rng(seed, key=(i,))
        thetas = _boundary_thetas(spec, dim, n_thetas, rng)
        errors = []
        for theta in thetas:
            y = theta + eps * rng.standard_normal((trials, dim))
            est = weights * y
            errors.append(((est - theta) ** 2).sum(axis=1))
        risk, se = _sup_risk(errors)
        points.append(RiskPoint(epsilon=eps, risk=risk, std_error=se, trials=trials))
    return RiskCurve(points)


@dataclass(frozen=True)
class AdaptivityRow:
    """Sup-risk of parameter-free blockwise James-Stein vs the oracle."""

    alpha: float
    radius: float
    bjs_risk: float
    bjs_se: float
    pinsker_risk: float
    pinsker_se: float

    @property
    def ratio(self) -> float:
        return self.bjs_risk / self.pinsker_risk


def adaptivity_ratio_bjs(
    specs,
    epsilon: float,
    trials: int,
    seed: int = 0,
    n_thetas: int = 50,
) -> list[AdaptivityRow]:
    """Compare blockwise James-Stein to the spec-aware linear minimax oracle.

    Both estimators see identical observations drawn around boundary-heavy
    parameters of each ellipsoid.  The blockwise estimator never looks at
    the spec; its zero cutoff is floor(log2(1/epsilon^2)) and it shrinks
    every block large enough for James-Stein, so only the first three
    coordinates pass through untouched.
    """
    if epsilon <= 0.0 or epsilon >= 1.0:
        raise ValueError("epsilon must lie in (0, 1) for the dyadic cutoff")
    if trials < 100:
        raise ValueError("trials must be at least 100")
    zero_limit = int(np.floor(np.log2(epsilon**-2)))
    if zero_limit <= 2:
        raise ValueError("epsilon too large for a nontrivial block range")
    partition = dyadic_blocks(0, zero_limit)
    dim = partition.width
    rows = []
    for si, spec in enumerate(specs):
        rng = _rng(seed, key=(si,))
        thetas = _boundary_thetas(spec, dim, n_thetas, rng)
        mu = pinsker_mu(spec, epsilon)
        weights = pinsker_weights(spec, mu, dim)
        bjs_errors, pin_errors = [], []
        for theta in thetas:
            y = theta + epsilon * rng.standard_normal((trials, dim))
            bjs_errors.append(((_bjs_rows(y, partition, epsilon) - theta) ** 2).sum(axis=1))
            pin_errors.append(((weights * y - theta) ** 2).sum(axis=1))
        bjs_risk, bjs_se = _sup_risk(bjs_errors)
        pin_risk, pin_se = _sup_risk(pin_errors)
        rows.append(
            AdaptivityRow(
                alpha=spec.alpha,
                radius=spec.radius,
                bjs_risk=bjs_risk,
                bjs_se=bjs_se,
                pinsker_risk=pin_risk,
                pinsker_se=pin_se,
            )
        )
    return rows


@dataclass(frozen=True)
class ConsistencyRow:
    """Decoder error against its Chebyshev bound at one sample count."""

    n_samples: int
    worst_class_error: float
    error_se: float
    chebyshev_bound: float
    bound_se: float


def consistency_experiment(
    model: ClassModel,
    n_grid,
    trials_per_class: int,
    noise: NoiseModel,
    seed: int = 0,
) -> list[ConsistencyRow]:
    """Minimum-distance decoding error of blockwise James-Stein estimates.

    For each sample count N, draws are perturbed class members observed
    through N noisy samples, estimated with the blockwise pipeline's
    settings (widest safe band, pass limit 2, zero cutoff floor(log2 N))
    at the true coefficient noise level sigma/sqrt(N), then decoded.
    Reports the worst per-class error next to the Chebyshev bound term
    (empirical sup MSE) / separation^2, both with standard errors.
    """
    ns = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError("n_grid must be strictly increasing")
    if trials_per_class < 1:
        raise ValueError("trials_per_class must be at least 1")
    model_count = 2 * model.truncation + 1
    rows = []
    for ni, n in enumerate(ns):
        count = bjs_coefficient_count(n)
        partition = dyadic_blocks(2, int(np.floor(np.log2(n))))
        phi = basis_matrix(model_count, np.arange(n) / n)
        class_errors = np.empty(model.n_classes)
        class_mses = np.empty(model.n_classes)
        class_mse_ses = np.empty(model.n_classes)
        for label in range(1, model.n_classes + 1):
            rng = _rng(seed, key=(ni, label))
            thetas = np.vstack(
                [
                    perturb_within_class(model, label, rng)
                    for _ in range(trials_per_class)
                ]
            )
            signals = thetas @ phi + noise.sigma * rng.standard_normal(
                (trials_per_class, n)
            )
            coeffs = transform_rows(signals, (count - 1) // 2)
            padded = np.zeros((trials_per_class, partition.width))
            padded[:, :count] = coeffs
            estimates = _bjs_rows(padded, partition, noise.sigma / np.sqrt(n))
            picks = _decode_rows(estimates, model)
            class_errors[label - 1] = float(np.mean(picks != label))
            truth = np.zeros((trials_per_class, partition.width))
            truth[:, :model_count] = thetas
            sq = ((estimates - truth) ** 2).sum(axis=1)
            class_mses[label - 1] = float(sq.mean())
            class_mse_ses[label - 1] = float(sq.std(ddof=1) / np.sqrt(sq.size))
        worst_ix = int(class_errors.argmax())
        worst = float(class_errors[worst_ix])
        error_se = float(np.sqrt(worst * (1.0 - worst) / trials_per_class))
        bound_ix = int(class_mses.argmax())
        rows.append(
            ConsistencyRow(
                n_samples=n,
                worst_class_error=worst,
                error_se=error_se,
                chebyshev_bound=float(class_mses[bound_ix]) / model.separation**2,
                bound_se=float(class_mse_ses[bound_ix]) / model.separation**2,
            )
        )
    return rows


@dataclass
class BenchmarkReport:
    """Cross-validation outcome of one pipeline configuration."""

    config: PipelineConfig
    scheme: str
    overall_accuracy: float
    per_class_accuracy: np.ndarray
    confusion: np.ndarray
    seed: int
    notes: list[str]

    @property
    def worst_class_error(self) -> float:
        seen = self.confusion.sum(axis=1) > 0
        return float((1.0 - self.per_class_accuracy[seen]).max())


def _as_report(
    config: PipelineConfig, cv: CrossValReport, seed: int
) -> BenchmarkReport:
    return BenchmarkReport(
        config=config,
        scheme=cv.scheme,
        overall_accuracy=cv.overall_accuracy,
        per_class_accuracy=cv.per_class_accuracy,
        confusion=cv.confusion,
        seed=seed,
        notes=cv.notes,
    )


def benchmark_classifiers(
    dataset, configs, scheme: str = "loso", seed: int = 0
) -> list[BenchmarkReport]:
    """Cross-validate each configuration on the same dataset and folds."""
    return [
        _as_report(config, cross_validate(dataset, config, scheme=scheme), seed)
        for config in configs
    ]


@dataclass
class PhaseAblationResult:
    """Paired accuracies with and without phase information."""

    full: BenchmarkReport
    magnitude: BenchmarkReport

    @property
    def accuracy_drop(self) -> float:
        return self.full.overall_accuracy - self.magnitude.overall_accuracy


def phase_ablation(
    dataset, config: PipelineConfig, scheme: str = "loso", seed: int = 0
) -> PhaseAblationResult:
    """Rerun one pipeline with harmonic pairs collapsed to magnitudes.

    Both runs use identical folds, so the accuracy difference isolates the
    contribution of phase information to the classifier.
    """
    if config.magnitude_only:
        raise ValueError("pass the full-feature config; the ablation derives the other")
    full = cross_validate(dataset, config, scheme=scheme)
    mag_config = replace(config, magnitude_only=True)
    magnitude = cross_validate(dataset, mag_config, scheme=scheme)
    return PhaseAblationResult(
        full=_as_report(config, full, seed),
        magnitude=_as_report(mag_config, magnitude, seed),
    )
