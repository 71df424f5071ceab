"""Shrinkage estimators for sequence-space observations.

Covers the exact linear minimax (water-filling) weights over a smoothness
ellipsoid, the positive-part James-Stein estimator, and its blockwise
variant on dyadic blocks, which adapts to unknown smoothness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import CoefficientVector

__all__ = [
    "EllipsoidSpec",
    "BlockPartition",
    "ellipsoid_weights",
    "pinsker_mu",
    "pinsker_weights",
    "pinsker_shrink",
    "james_stein",
    "dyadic_blocks",
    "bjs_estimate",
]


@dataclass(frozen=True)
class EllipsoidSpec:
    """Smoothness ellipsoid { theta : sum_k a_k^2 theta_k^2 <= radius^2 }.

    ``alpha`` is the smoothness exponent entering the semiaxis weights
    (see :func:`ellipsoid_weights`); ``radius`` bounds the weighted norm.
    """

    alpha: float
    radius: float

    def __post_init__(self) -> None:
        if not np.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ValueError("alpha must be positive")
        if not np.isfinite(self.radius) or self.radius <= 0.0:
            raise ValueError("radius must be positive")


def ellipsoid_weights(spec: EllipsoidSpec, count: int) -> np.ndarray:
    """First ``count`` semiaxis weights of the ellipsoid.

    a_1 = 0 (the mean is unconstrained) and a_2m = a_2m+1 = (2m)^alpha,
    pairing each cosine with its sine of equal frequency.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    ks = np.arange(1, count + 1)
    return (2.0 * (ks // 2)) ** spec.alpha


def pinsker_mu(spec: EllipsoidSpec, epsilon: float, rel_tol: float = 1e-10) -> float:
    """Water-filling level mu for the linear minimax weights.

    Solves eps^2 * sum_k a_k (mu - a_k)_+ = radius^2 by bisection.  The
    left side is continuous and nondecreasing in mu and the sum is finite
    for any finite mu because the weights grow without bound.

    Parameters
    ----------
    spec : EllipsoidSpec
    epsilon : float
        Per-coefficient noise level, > 0.
    rel_tol : float
        Relative width of the final bisection bracket.
    """
    if not np.isfinite(epsilon) or epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    target = spec.radius**2

    def filled(mu: float) -> float:
        # only pairs with (2m)^alpha < mu contribute; add one pair of slack
        pairs = int(np.floor(mu ** (1.0 / spec.alpha) / 2.0)) + 1
        a = ellipsoid_weights(spec, 2 * pairs + 1)
        return float(epsilon**2 * np.sum(a * np.clip(mu - a, 0.0, None)))

    lo = 0.0
    hi = max(2.0**spec.alpha, 1.0)
    while filled(hi) < target:
        hi *= 2.0
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if filled(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def pinsker_weights(spec: EllipsoidSpec, mu: float, count: int) -> np.ndarray:
    """Linear minimax shrinkage factors c_k = (1 - a_k / mu)_+ for k <= count."""
    if not np.isfinite(mu) or mu <= 0.0:
        raise ValueError("mu must be positive")
    a = ellipsoid_weights(spec, count)
    return np.clip(1.0 - a / mu, 0.0, None)


def pinsker_shrink(
    y: CoefficientVector, spec: EllipsoidSpec, mu: float
) -> CoefficientVector:
    """Apply the linear minimax weights coefficientwise.

    With mu from :func:`pinsker_mu` this is the exact minimax linear
    estimator over the ellipsoid at the vector's noise level; any other
    positive mu gives a valid (suboptimal) diagonal linear estimator.
    """
    weights = pinsker_weights(spec, mu, len(y))
    return CoefficientVector(weights * y.coeffs, epsilon=y.epsilon)


def james_stein(y, epsilon: float) -> np.ndarray:
    """Positive-part James-Stein estimate of the mean of y ~ N(theta, eps^2 I).

    Returns (1 - (n-2) eps^2 / ||y||^2)_+ * y.  Requires n > 2, where the
    estimator starts to dominate the identity; a zero observation maps to
    the zero vector.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1:
        raise ValueError("y must be a 1-D vector")
    n = y.size
    if n <= 2:
        raise ValueError("James-Stein requires more than 2 coordinates")
    if not np.isfinite(epsilon) or epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    norm_sq = float(y @ y)
    if norm_sq == 0.0:
        return np.zeros_like(y)
    factor = max(0.0, 1.0 - (n - 2) * epsilon**2 / norm_sq)
    return factor * y


@dataclass(frozen=True)
class BlockPartition:
    """Dyadic partition of coefficient indices for blockwise James-Stein.

    Block j covers 1-based indices 2^j .. 2^(j+1)-1 and has size 2^j.
    Blocks 0..pass_limit are copied unshrunk, blocks above are James-Stein
    shrunk, and indices >= 2^zero_limit are set to zero.
    """

    pass_limit: int
    zero_limit: int
    blocks: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.pass_limit < 0:
            raise ValueError("pass_limit must be nonnegative")
        if self.pass_limit >= self.zero_limit:
            raise ValueError("pass_limit must be strictly below zero_limit")
        expected = tuple(
            (2**j, 2 ** (j + 1) - 1) for j in range(self.zero_limit)
        )
        if tuple(self.blocks) != expected:
            raise ValueError("blocks must be the dyadic ranges [2^j, 2^(j+1)-1]")

    @property
    def width(self) -> int:
        """Number of coefficients covered, 2^zero_limit - 1."""
        return 2**self.zero_limit - 1


def dyadic_blocks(pass_limit: int, zero_limit: int) -> BlockPartition:
    """Build the dyadic partition with the given pass-through and zero cutoffs."""
    if pass_limit >= zero_limit:
        raise ValueError("pass_limit must be strictly below zero_limit")
    blocks = tuple((2**j, 2 ** (j + 1) - 1) for j in range(zero_limit))
    return BlockPartition(pass_limit=pass_limit, zero_limit=zero_limit, blocks=blocks)


def _bjs_rows(rows: np.ndarray, partition: BlockPartition, epsilon: float) -> np.ndarray:
    """Blockwise James-Stein applied to every row of a coefficient matrix.

    ``rows`` must be at least ``partition.width`` columns wide; columns
    beyond the partition are zeroed in the output.
    """
    if rows.ndim != 2:
        raise ValueError("rows must be 2-D")
    if rows.shape[1] < partition.width:
        raise ValueError("rows are narrower than the block partition")
    out = np.zeros_like(rows)
    for j, (first, last) in enumerate(partition.blocks):
        block = rows[:, first - 1 : last]
        size = last - first + 1
        if j <= partition.pass_limit or size <= 2:
            out[:, first - 1 : last] = block
            continue
        norms_sq = np.einsum("ij,ij->i", block, block)
        factors = np.zeros(rows.shape[0])
        hit = norms_sq > 0.0
        factors[hit] = np.clip(
            1.0 - (size - 2) * epsilon**2 / norms_sq[hit], 0.0, None
        )
        out[:, first - 1 : last] = factors[:, None] * block
    return out


def bjs_estimate(y: CoefficientVector, partition: BlockPartition) -> CoefficientVector:
    """Blockwise James-Stein estimate over a dyadic partition.

    Low blocks (j <= pass_limit) pass through unshrunk, higher blocks are
    James-Stein shrunk with the vector's own noise level, and everything
    at or above index 2^zero_limit is zeroed.  Blocks of size <= 2 inside
    the shrinkage range also pass through, since James-Stein is undefined
    there.  The input is zero-padded to the partition width if shorter.
    """
    if y.epsilon <= 0.0:
        raise ValueError("blockwise James-Stein requires a positive noise level")
    width = max(len(y), partition.width)
    rows = np.zeros((1, width))
    rows[0, : len(y)] = y.coeffs
    shrunk = _bjs_rows(rows, partition, y.epsilon)[0]
    return CoefficientVector(shrunk, epsilon=y.epsilon)
