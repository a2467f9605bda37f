"""Frechet distance between embedding distributions (Gaussian assumption)."""

import warnings

import numpy as np

from powergan.errors import InvalidShape

_JITTER = 1e-6


def _sqrt_psd(mat: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root via eigendecomposition, clamping noise."""
    vals, vecs = np.linalg.eigh((mat + mat.T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.T


def frechet_distance(emb_real: np.ndarray, emb_fake: np.ndarray) -> float:
    """||mu_r - mu_f||^2 + Tr(S_r + S_f - 2 (S_r S_f)^(1/2)).

    Trace of the cross square root computed as the PSD root of
    sqrt(S_r) S_f sqrt(S_r), which shares its eigenvalues with S_r S_f but
    stays symmetric. Both covariances get a small diagonal jitter so
    rank-deficient embeddings stay well-posed.
    """
    emb_real = np.asarray(emb_real, dtype=np.float64)
    emb_fake = np.asarray(emb_fake, dtype=np.float64)
    if emb_real.ndim != 2 or emb_fake.ndim != 2 or emb_real.shape[1] != emb_fake.shape[1]:
        raise InvalidShape(f"embedding shapes {emb_real.shape} vs {emb_fake.shape}")
    dim = emb_real.shape[1]
    if min(emb_real.shape[0], emb_fake.shape[0]) <= dim:
        warnings.warn(
            f"fewer samples than embedding dimension {dim}; covariance is rank-deficient",
            stacklevel=2,
        )

    mu_r, mu_f = emb_real.mean(axis=0), emb_fake.mean(axis=0)
    cov_r = np.cov(emb_real, rowvar=False) + _JITTER * np.eye(dim)
    cov_f = np.cov(emb_fake, rowvar=False) + _JITTER * np.eye(dim)

    sqrt_r = _sqrt_psd(cov_r)
    cross = _sqrt_psd(sqrt_r @ cov_f @ sqrt_r)
    diff = mu_r - mu_f
    fid = float(diff @ diff + np.trace(cov_r) + np.trace(cov_f) - 2.0 * np.trace(cross))
    return max(fid, 0.0)
