"""Sliced Wasserstein distance between feature sets."""

import numpy as np

from powergan.errors import EmptyCorpus, InvalidShape
from powergan.seeds import substream


def _projected_w1(proj_a: np.ndarray, proj_b: np.ndarray) -> np.ndarray:
    """Per-projection 1-D Wasserstein-1 between (N, P) and (M, P) columns."""
    a = np.sort(proj_a, axis=0)
    b = np.sort(proj_b, axis=0)
    if a.shape[0] == b.shape[0]:
        return np.abs(a - b).mean(axis=0)
    # unequal sizes: align on a common quantile grid (linear interpolation)
    k = max(a.shape[0], b.shape[0])
    grid = (np.arange(k) + 0.5) / k
    qa = np.quantile(a, grid, axis=0)
    qb = np.quantile(b, grid, axis=0)
    return np.abs(qa - qb).mean(axis=0)


def sliced_wasserstein(
    features_real: np.ndarray,
    features_fake: np.ndarray,
    iterations: int = 10,
    projections: int = 1000,
    seed: int = 0,
) -> tuple[float, float]:
    """Mean and std, over iterations, of the average projected W1 distance.

    Features are standardized per dimension with real-corpus statistics
    only. Each iteration draws fresh unit projection vectors (normalized
    Gaussian); within an iteration the distance is averaged over
    projections.
    """
    real = np.asarray(features_real, dtype=np.float64)
    fake = np.asarray(features_fake, dtype=np.float64)
    if real.ndim != 2 or fake.ndim != 2:
        raise InvalidShape("feature sets must be 2-D (samples, dims)")
    if real.shape[0] == 0 or fake.shape[0] == 0:
        raise EmptyCorpus("feature sets must be non-empty")
    if real.shape[1] != fake.shape[1]:
        raise InvalidShape(f"feature dims differ: {real.shape[1]} vs {fake.shape[1]}")

    mu = real.mean(axis=0)
    sd = real.std(axis=0)
    sd[sd < 1e-12] = 1.0
    real = (real - mu) / sd
    fake = (fake - mu) / sd

    rng = substream(seed, "swd-projections")
    dim = real.shape[1]
    means = []
    for _ in range(iterations):
        theta = rng.standard_normal((dim, projections))
        theta /= np.linalg.norm(theta, axis=0, keepdims=True)
        means.append(_projected_w1(real @ theta, fake @ theta).mean())
    means = np.asarray(means)
    return float(means.mean()), float(means.std())
