"""Synthetic two-class fixture: a fake house recording plus its windows.

Class single_pulse holds one ON-OFF plateau per event; class double_pulse
holds two shorter plateaus separated by a gap. Both classes draw levels and
total ON time from the same distributions, so the only class signal is the
arrangement: when one class was amplitude-simpler than the other, the
generator collapsed both labels onto the easier shape family. Events are
spaced wider than one window so activation suppression yields exactly one
window per event, and every window clears the default energy and sparsity
filters.
"""

import json
from pathlib import Path

import numpy as np

from powergan.data_pipeline.pipeline import preprocess
from powergan.data_pipeline.windows import FilterParams
from powergan.seeds import substream

TOY_WINDOW_LENGTH = 280  # 70 * 2**2, three training stages
_SPACING = 320  # samples between event starts, > window length
_MARGIN = 160
_NOISE_FLOOR_W = 3.0


def _sensor_noise(rng: np.random.Generator, n_samples: int) -> np.ndarray:
    # real meters never report exact zeros; an exactly-zero OFF state would
    # hand the critic an unbounded separating direction no conv generator
    # can close, destabilizing adversarial training on this fixture
    return np.abs(rng.normal(0.0, _NOISE_FLOOR_W, size=n_samples))


def _single_pulse_events(rng: np.random.Generator, n_samples: int, count: int) -> np.ndarray:
    # intra-class variation is kept narrow so the desk-scale generator can
    # actually master both shape families within a short schedule; with
    # wide level/duration ranges it emits ragged multi-pulse blobs instead
    trace = _sensor_noise(rng, n_samples)
    for k in range(count):
        start = _MARGIN + k * _SPACING
        duration = int(rng.integers(56, 61))
        level = rng.uniform(1600.0, 1800.0)
        wobble = rng.uniform(-10.0, 10.0, size=duration)
        trace[start : start + duration] = level + wobble
    return trace


def _double_pulse_events(rng: np.random.Generator, n_samples: int, count: int) -> np.ndarray:
    trace = _sensor_noise(rng, n_samples)
    for k in range(count):
        start = _MARGIN + k * _SPACING
        level = rng.uniform(1600.0, 1800.0)
        pos = start
        # two pulses fit well inside the 140 samples that follow the first
        # edge, so the whole event lands in the window cut around that edge
        for _ in range(2):
            duration = int(rng.integers(24, 27))
            wobble = rng.uniform(-10.0, 10.0, size=duration)
            trace[pos : pos + duration] = level + wobble
            pos += duration + int(rng.integers(14, 17))
    return trace


def make_toy_dataset(out_dir, seed: int, events_per_class: int = 64) -> dict:
    """Write house.csv, column_map.json, and the preprocessed windows/.

    Returns a summary dict including the per-label window counts.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    n_samples = 2 * _MARGIN + events_per_class * _SPACING

    single = _single_pulse_events(substream(seed, "toy-single"), n_samples, events_per_class)
    double = _double_pulse_events(substream(seed, "toy-double"), n_samples, events_per_class)
    timestamps = 1_600_000_000 + 8 * np.arange(n_samples, dtype=np.int64)

    csv_path = out_dir / "house.csv"
    with open(csv_path, "w") as f:
        f.write("timestamp_unix_s,aggregate_w,toy_single,toy_double\n")
        for t, a, b in zip(timestamps, single, double):
            f.write(f"{t},{a + b + 80.0:.1f},{a:.1f},{b:.1f}\n")

    map_path = out_dir / "column_map.json"
    with open(map_path, "w") as f:
        json.dump({"toy_single": "single_pulse", "toy_double": "double_pulse"}, f, indent=2, sort_keys=True)
        f.write("\n")

    windows_dir = out_dir / "windows"
    summary = preprocess(
        [csv_path],
        map_path,
        windows_dir,
        seed=seed,
        window_length=TOY_WINDOW_LENGTH,
        filter_params=FilterParams(),
    )
    return {
        "csv": str(csv_path),
        "column_map": str(map_path),
        "windows_dir": str(windows_dir),
        **summary,
    }
