"""End-to-end preprocessing: house CSVs -> balanced normalized PGW1 dataset."""

from pathlib import Path

from powergan.data_pipeline import pgw
from powergan.data_pipeline.ingest import load_column_map, load_house_csv
from powergan.data_pipeline.series import resample_to_grid
from powergan.data_pipeline.windows import (
    FilterParams,
    balance_and_normalize,
    cut_windows,
    detect_activations,
    filter_windows,
)
from powergan.errors import EmptyClass

WINDOW_LENGTH = 2240  # 70 * 2**5, just under 5 h at 8 s sampling


def preprocess(
    csv_paths,
    column_map_path,
    out_dir,
    seed: int,
    window_length: int = WINDOW_LENGTH,
    filter_params: FilterParams | None = None,
    max_fill_s: float = 120.0,
) -> dict:
    """Run the full ingest/window/filter/balance pipeline and write PGW1 files.

    Returns a summary dict with per-stage counts for logging and tests.
    """
    filter_params = filter_params or FilterParams()
    column_map = load_column_map(column_map_path)
    labels = sorted(set(column_map.values()))

    cut = []
    n_segments = 0
    for csv_path in csv_paths:
        for raw in load_house_csv(csv_path, column_map):
            for segment in resample_to_grid(raw, max_fill_s=max_fill_s):
                n_segments += 1
                if len(segment) < window_length:
                    continue
                acts = detect_activations(segment, filter_params)
                cut.extend(cut_windows(segment, acts, window_length))

    accepted = filter_windows(cut, filter_params)
    if not accepted:
        raise EmptyClass("no windows survived filtering; check thresholds and inputs")
    balanced, manifest = balance_and_normalize(
        accepted, seed=seed, labels=labels, filter_params=filter_params
    )
    paths = pgw.write_dataset(Path(out_dir), balanced, manifest)

    per_label = {lab: sum(1 for w in balanced if w.label == lab) for lab in labels}
    return {
        "segments": n_segments,
        "windows_cut": len(cut),
        "windows_accepted": len(accepted),
        "windows_balanced": len(balanced),
        "per_label": per_label,
        "scales": manifest.scales,
        "files": {k: str(v) for k, v in paths.items()},
    }
