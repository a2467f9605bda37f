"""Ingest, windowing, filtering, batching, and the PGW1 dataset format."""

from powergan.data_pipeline.batches import (
    circular_shift,
    epoch_batches,
    max_pool_rows,
    shift_and_pool,
    stage_factor,
)
from powergan.data_pipeline.ingest import load_column_map, load_house_csv
from powergan.data_pipeline.pgw import read_dataset, read_pgw, write_dataset, write_pgw
from powergan.data_pipeline.pipeline import WINDOW_LENGTH, preprocess
from powergan.data_pipeline.series import RawSeries, RegularSeries, resample_to_grid
from powergan.data_pipeline.windows import (
    CANONICAL_LABELS,
    SAMPLE_PERIOD_S,
    FilterParams,
    NormalizationManifest,
    Window,
    balance_and_normalize,
    cut_windows,
    detect_activations,
    filter_windows,
    hoyer_sparsity,
    window_energy_above_steady,
)

__all__ = [
    "CANONICAL_LABELS",
    "SAMPLE_PERIOD_S",
    "WINDOW_LENGTH",
    "FilterParams",
    "NormalizationManifest",
    "RawSeries",
    "RegularSeries",
    "Window",
    "balance_and_normalize",
    "circular_shift",
    "cut_windows",
    "detect_activations",
    "epoch_batches",
    "filter_windows",
    "hoyer_sparsity",
    "load_column_map",
    "load_house_csv",
    "max_pool_rows",
    "preprocess",
    "read_dataset",
    "read_pgw",
    "resample_to_grid",
    "shift_and_pool",
    "stage_factor",
    "window_energy_above_steady",
    "write_dataset",
    "write_pgw",
]
