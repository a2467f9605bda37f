"""Stage-resolution batching: random circular shift, then max-pool decimation.

Stage n of N_b trains at 1/2^(N_b-n) of the full resolution, so the real
data is pooled down by that factor. Shifting before pooling augments phase
so the nets cannot memorize activation positions.
"""

import numpy as np

from powergan.errors import EmptyDataset, InvalidStage


def stage_factor(stage: int, n_stages: int) -> int:
    """Decimation factor 2^(n_stages - stage) for 1-based stage index."""
    if not 1 <= stage <= n_stages:
        raise InvalidStage(f"stage {stage} outside 1..{n_stages}")
    return 2 ** (n_stages - stage)


def circular_shift(rows: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Roll each row right by its own offset (wrapping)."""
    rows = np.asarray(rows)
    n = rows.shape[-1]
    idx = (np.arange(n)[None, :] - np.asarray(offsets)[:, None]) % n
    return np.take_along_axis(rows, idx, axis=-1)


def max_pool_rows(rows: np.ndarray, factor: int) -> np.ndarray:
    """Non-overlapping max pooling along the last axis."""
    rows = np.asarray(rows)
    n = rows.shape[-1]
    if factor < 1 or n % factor:
        raise ValueError(f"length {n} not divisible by pool factor {factor}")
    if factor == 1:
        return rows.copy()
    return rows.reshape(*rows.shape[:-1], n // factor, factor).max(axis=-1)


def shift_and_pool(rows: np.ndarray, factor: int, rng: np.random.Generator) -> np.ndarray:
    """Random circular shift per row, then max-pool by factor."""
    rows = np.asarray(rows, dtype=np.float32)
    offsets = rng.integers(0, rows.shape[-1], size=rows.shape[0])
    return max_pool_rows(circular_shift(rows, offsets), factor)


def epoch_batches(samples, label_ids, batch_size: int, factor: int, rng: np.random.Generator):
    """Yield (pooled_samples, label_ids) minibatches covering one epoch.

    Batches are single-class. With class-mixed batches the minibatch-std
    feature mostly reflects between-class variance, so per-class mode
    collapse passes undetected, and the critic can separate real from fake
    without ever reading its label channels; single-class batches force
    label-conditional discrimination. Windows are shuffled within class,
    batch order is shuffled across classes, rows are shifted and pooled;
    the trailing short batch of each class is kept. Samples come out
    (B, 1, N/factor) float32 ready for a channels-first conv stack.
    """
    samples = np.asarray(samples, dtype=np.float32)
    label_ids = np.asarray(label_ids, dtype=np.int64)
    if samples.ndim != 2 or samples.shape[0] != label_ids.shape[0]:
        raise ValueError("samples must be (count, length) matching label_ids")
    if samples.shape[0] == 0:
        raise EmptyDataset("no windows to batch")
    if batch_size < 1:
        raise ValueError("batch_size must be positive")
    chunks = []
    for lid in np.unique(label_ids):
        idx = np.flatnonzero(label_ids == lid)
        idx = idx[rng.permutation(idx.size)]
        chunks.extend(idx[lo : lo + batch_size] for lo in range(0, idx.size, batch_size))
    chunk_order = rng.permutation(len(chunks))
    order = np.concatenate([chunks[i] for i in chunk_order])
    shifted = shift_and_pool(samples[order], factor, rng)
    labels = label_ids[order]
    lo = 0
    for i in chunk_order:
        size = chunks[i].size
        yield shifted[lo : lo + size, None, :], labels[lo : lo + size]
        lo += size
