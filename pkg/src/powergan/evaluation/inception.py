"""Inception score over classifier posteriors."""

import numpy as np
from scipy.special import xlogy

from powergan.errors import InvalidDistribution


def inception_score(probs: np.ndarray, splits: int = 10) -> tuple[float, float]:
    """exp(mean KL(p(y|x) || p(y))) per split; returns (mean, std) over splits.

    The marginal p(y) is the split's own mean posterior. Rows must be
    probability vectors; the split std uses population normalization.
    """
    probs = np.asarray(probs, dtype=np.float64)
    if probs.ndim != 2 or probs.shape[0] == 0:
        raise InvalidDistribution("probs must be a non-empty (samples, classes) matrix")
    if np.any(probs < 0) or np.any(np.abs(probs.sum(axis=1) - 1.0) > 1e-6):
        raise InvalidDistribution("rows must be non-negative and sum to 1")
    if splits < 1:
        raise ValueError("splits must be >= 1")
    if probs.shape[0] < splits:
        raise InvalidDistribution(f"{probs.shape[0]} samples cannot fill {splits} splits")

    scores = []
    for part in np.array_split(probs, splits):
        marginal = part.mean(axis=0)
        kl = (xlogy(part, part) - xlogy(part, marginal)).sum(axis=1)
        scores.append(np.exp(kl.mean()))
    scores = np.asarray(scores)
    return float(scores.mean()), float(scores.std())
