"""Laplacian "triangle": a 1-D Laplacian pyramid plus patch descriptors.

Analysis: repeatedly blur (15-sample Gaussian, sigma 2.5, reflect padding)
and decimate by 2 until the level drops below twice the kernel length. Each
detail band is the level minus the smoothed nearest-neighbour upsampling of
the next level, so synthesis reconstructs the input exactly.
"""

from dataclasses import dataclass

import numpy as np

from powergan.errors import InvalidShape
from powergan.seeds import substream

KERNEL_LENGTH = 15
SIGMA = 2.5
MIN_LEVEL_LENGTH = 2 * KERNEL_LENGTH  # 30
PATCH_LENGTH = 16
PATCHES_PER_LEVEL = 64


def gaussian_kernel(length: int = KERNEL_LENGTH, sigma: float = SIGMA) -> np.ndarray:
    x = np.arange(length, dtype=np.float64) - (length - 1) / 2.0
    k = np.exp(-(x**2) / (2.0 * sigma**2))
    return k / k.sum()


_KERNEL = gaussian_kernel()


def blur(x: np.ndarray) -> np.ndarray:
    """Length-preserving Gaussian smoothing with reflected boundaries."""
    pad = KERNEL_LENGTH // 2
    padded = np.pad(np.asarray(x, dtype=np.float64), pad, mode="reflect")
    return np.convolve(padded, _KERNEL, mode="valid")


def upsample_nn(x: np.ndarray) -> np.ndarray:
    return np.repeat(np.asarray(x), 2)


@dataclass
class LaplacianTriangle:
    details: list[np.ndarray]
    residual: np.ndarray

    @property
    def levels(self) -> list[np.ndarray]:
        return self.details + [self.residual]


def build_triangle(window) -> LaplacianTriangle:
    """Decompose one window; requires length >= 2 x kernel length."""
    g = np.asarray(getattr(window, "samples", window), dtype=np.float64)
    if g.ndim != 1 or g.size < MIN_LEVEL_LENGTH:
        raise InvalidShape(f"window must be 1-D with >= {MIN_LEVEL_LENGTH} samples, got {g.shape}")
    pyramid = [g]
    while pyramid[-1].size >= MIN_LEVEL_LENGTH:
        pyramid.append(blur(pyramid[-1])[::2])
    details = []
    for level, coarser in zip(pyramid, pyramid[1:]):
        details.append(level - blur(upsample_nn(coarser)[: level.size]))
    return LaplacianTriangle(details=details, residual=pyramid[-1])


def reconstruct(triangle: LaplacianTriangle) -> np.ndarray:
    """Exact synthesis: fold the residual back up through the details."""
    g = triangle.residual
    for d in reversed(triangle.details):
        g = d + blur(upsample_nn(g)[: d.size])
    return g


def laplacian_features(
    windows: np.ndarray,
    seed: int,
    patch_length: int = PATCH_LENGTH,
    patches_per_level: int = PATCHES_PER_LEVEL,
) -> np.ndarray:
    """Patch descriptors: per window, per pyramid level (details and
    residual), a fixed number of randomly positioned patches. Levels
    shorter than a patch are skipped (never happens for the supported
    window-length family). Returns (windows*levels*patches, patch_length).
    """
    windows = np.atleast_2d(np.asarray(windows, dtype=np.float64))
    rng = substream(seed, "lap-patches")
    rows = []
    for w in windows:
        for level in build_triangle(w).levels:
            if level.size < patch_length:
                continue
            starts = rng.integers(0, level.size - patch_length + 1, size=patches_per_level)
            rows.extend(level[s : s + patch_length] for s in starts)
    return np.asarray(rows)
