"""Sampling traces from a trained checkpoint, with post-processing and export.

Post-processing follows training-data conventions: negative samples are
clamped to zero, windows are denormalized back to watts with the stored
per-label scales, and windows failing the same above-steady-state energy
threshold the training data had to pass are rejected and redrawn.
"""

import csv
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from powergan.data_pipeline.pgw import write_dataset
from powergan.data_pipeline.windows import (
    FilterParams,
    NormalizationManifest,
    Window,
    window_energy_above_steady,
)
from powergan.errors import GenerationStarved, InvalidLabel, IoError
from powergan.seeds import substream
from powergan.trainer.checkpointing import Checkpoint

_DRAW_CHUNK = 64


@dataclass(frozen=True)
class GenerationRequest:
    label: str
    count: int
    seed: int
    max_rejections_per_sample: int = 100

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.max_rejections_per_sample < 0:
            raise ValueError("max_rejections_per_sample must be >= 0")


def generate_with_stats(checkpoint: Checkpoint, request: GenerationRequest) -> tuple[list[Window], dict]:
    """Sample accepted windows plus acceptance statistics.

    Draws run in chunks; each raw window is clamped to non-negative,
    denormalized (when the checkpoint carries normalization scales), and
    kept only if its above-steady-state energy clears the training
    threshold. Returns exactly request.count windows or raises
    GenerationStarved once the rejection budget is spent.
    """
    manifest = checkpoint.normalization
    if manifest is None:
        raise InvalidLabel("checkpoint has no normalization manifest; cannot map labels or watts")
    labels = manifest.labels
    if request.label not in labels:
        raise InvalidLabel(f"label {request.label!r} not in checkpoint labels {labels}")
    if checkpoint.stage < checkpoint.net_config.n_stages:
        warnings.warn(
            f"checkpoint is at stage {checkpoint.stage}/{checkpoint.net_config.n_stages}; "
            "output resolution is below native", stacklevel=2)

    label_id = labels.index(request.label)
    scale = manifest.scales[request.label]
    threshold = float(manifest.filter.get("energy_threshold_wh", FilterParams().energy_threshold_wh))
    period = manifest.sample_period_s

    generator = checkpoint.generator
    generator.eval()
    rng = substream(request.seed, "generate", label_id)
    budget = request.count * (1 + request.max_rejections_per_sample)
    accepted: list[Window] = []
    rejected = 0
    while len(accepted) < request.count:
        chunk = min(_DRAW_CHUNK, budget - len(accepted) - rejected)
        if chunk <= 0:
            evaluated = len(accepted) + rejected
            rate = len(accepted) / evaluated if evaluated else 0.0
            raise GenerationStarved(
                f"accepted {len(accepted)}/{request.count} after {evaluated} draws "
                f"(acceptance rate {rate:.3f})", acceptance_rate=rate)
        z = torch.from_numpy(rng.standard_normal((chunk, generator.config.n_z)).astype(np.float32))
        ids = torch.full((chunk,), label_id, dtype=torch.int64)
        with torch.no_grad():
            raw = generator(z, ids, alpha=1.0).squeeze(1).numpy()
        watts = np.clip(raw, 0.0, None) * np.float32(scale)
        for row in watts:
            if len(accepted) >= request.count:
                break  # surplus rows from the chunk are discarded unjudged
            if window_energy_above_steady(row, period) >= threshold:
                accepted.append(Window(label=request.label, samples=row))
            else:
                rejected += 1
    evaluated = len(accepted) + rejected
    stats = {
        "evaluated": evaluated,
        "accepted": len(accepted),
        "rejected": rejected,
        "acceptance_rate": len(accepted) / evaluated,
        "rejection_rate": rejected / evaluated,
        "energy_threshold_wh": threshold,
    }
    return accepted, stats


def generate(checkpoint: Checkpoint, request: GenerationRequest) -> list[Window]:
    windows, _ = generate_with_stats(checkpoint, request)
    return windows


def export_csv(windows: list[Window], path) -> Path:
    """Long-format CSV: label, window_id, sample_index, power_w (6 sig digits)."""
    path = Path(path)
    try:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["label", "window_id", "sample_index", "power_w"])
            for wid, w in enumerate(windows):
                for i, v in enumerate(w.samples):
                    writer.writerow([w.label, wid, i, f"{float(v):.6g}"])
    except OSError as e:
        raise IoError(f"cannot write {path}: {e}") from e
    return path


def export_pgw(windows: list[Window], directory, manifest: NormalizationManifest) -> Path:
    """PGW1 dataset directory holding the windows verbatim.

    Generated windows are already in watts, so the emitted manifest sets
    every scale to 1.0: dataset semantics stay "stored value times scale =
    watts" and the round trip is bit-exact.
    """
    length = windows[0].samples.size if windows else manifest.window_length
    out_manifest = NormalizationManifest(
        scales={w.label: 1.0 for w in windows} or {lab: 1.0 for lab in manifest.labels},
        window_length=length,
        sample_period_s=manifest.sample_period_s,
        filter=dict(manifest.filter),
    )
    write_dataset(directory, windows, out_manifest)
    return Path(directory)


def read_exported_csv(path) -> list[Window]:
    """Inverse of export_csv, preserving window order."""
    path = Path(path)
    grouped: dict[int, tuple[str, list[float]]] = {}
    try:
        with open(path, newline="") as f:
            for row in csv.DictReader(f):
                wid = int(row["window_id"])
                entry = grouped.setdefault(wid, (row["label"], []))
                if int(row["sample_index"]) != len(entry[1]):
                    raise IoError(f"{path}: sample_index out of order in window {wid}")
                entry[1].append(float(row["power_w"]))
    except (OSError, KeyError, ValueError) as e:
        raise IoError(f"cannot parse {path}: {e}") from e
    return [
        Window(label=grouped[wid][0], samples=np.array(grouped[wid][1], dtype=np.float32))
        for wid in sorted(grouped)
    ]


def amplitude_matched_noise(real: np.ndarray, count: int, seed: int) -> np.ndarray:
    """White-noise windows matching the pooled mean/std of real data,
    clamped non-negative; the standard degenerate baseline for metric
    ordering checks."""
    real = np.asarray(real, dtype=np.float64)
    rng = substream(seed, "noise-baseline")
    draws = rng.normal(real.mean(), real.std(), size=(count, real.shape[1]))
    return np.clip(draws, 0.0, None).astype(np.float32)
