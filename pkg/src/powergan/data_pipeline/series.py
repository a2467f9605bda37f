"""Irregular meter readings -> regular 8 s grids.

Small gaps are bridged by forward fill; anything longer than the fill limit
splits the recording into independent segments so synthetic plateaus never
span an outage.
"""

from dataclasses import dataclass

import numpy as np

from powergan.data_pipeline.windows import SAMPLE_PERIOD_S


@dataclass
class RawSeries:
    """Timestamped single-appliance readings, seconds and watts."""

    appliance_label: str
    timestamps_s: np.ndarray
    power_w: np.ndarray

    def __post_init__(self):
        self.timestamps_s = np.asarray(self.timestamps_s, dtype=np.float64)
        self.power_w = np.asarray(self.power_w, dtype=np.float64)
        if self.timestamps_s.shape != self.power_w.shape or self.timestamps_s.ndim != 1:
            raise ValueError("timestamps and power must be matching 1-D arrays")
        if self.timestamps_s.size and np.any(np.diff(self.timestamps_s) <= 0):
            raise ValueError("timestamps must be strictly increasing")


@dataclass
class RegularSeries:
    """Evenly sampled power trace on a fixed period grid."""

    label: str
    power: np.ndarray
    sample_period_s: float = SAMPLE_PERIOD_S
    start_time_s: float = 0.0

    def __post_init__(self):
        self.power = np.asarray(self.power, dtype=np.float32)
        if self.power.ndim != 1:
            raise ValueError("power must be one-dimensional")
        if self.sample_period_s <= 0:
            raise ValueError("sample period must be positive")

    def __len__(self):
        return self.power.size


def resample_to_grid(
    series: RawSeries,
    sample_period_s: float = SAMPLE_PERIOD_S,
    max_fill_s: float = 120.0,
) -> list[RegularSeries]:
    """Snap readings to a uniform grid, forward-filling gaps up to max_fill_s.

    Grid points sit at start + k*period. Each grid point takes the most
    recent reading at or before it; grid points whose most recent reading is
    older than max_fill_s start a new segment. Returns the non-empty
    segments in time order (possibly none for an empty input).
    """
    t, p = series.timestamps_s, series.power_w
    if t.size == 0:
        return []
    n_grid = int(np.floor((t[-1] - t[0]) / sample_period_s)) + 1
    grid = t[0] + sample_period_s * np.arange(n_grid)
    # index of latest reading <= grid point
    src = np.searchsorted(t, grid, side="right") - 1
    age = grid - t[src]
    fresh = age <= max_fill_s
    values = p[src].astype(np.float32)

    segments = []
    run_start = None
    for i in range(n_grid + 1):
        if i < n_grid and fresh[i]:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            segments.append(
                RegularSeries(
                    label=series.appliance_label,
                    power=values[run_start:i],
                    sample_period_s=sample_period_s,
                    start_time_s=float(grid[run_start]),
                )
            )
            run_start = None
    return segments
