"""CSV ingest for household meter exports.

Expected layout: a `timestamp_unix_s` column, an optional `aggregate_w`
column (ignored here), and one column per metered appliance. A JSON column
map assigns appliance labels to the columns worth keeping.
"""

import json
from pathlib import Path

import pandas as pd

from powergan.data_pipeline.series import RawSeries
from powergan.errors import IoError

TIMESTAMP_COLUMN = "timestamp_unix_s"


def load_column_map(path) -> dict[str, str]:
    """Read a {column_name: appliance_label} JSON map."""
    try:
        with open(path) as f:
            mapping = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read column map {path}: {e}") from e
    if not isinstance(mapping, dict) or not mapping:
        raise IoError(f"column map {path} must be a non-empty JSON object")
    return {str(k): str(v) for k, v in mapping.items()}


def load_house_csv(csv_path, column_map: dict[str, str]) -> list[RawSeries]:
    """Extract one RawSeries per mapped column from a house CSV.

    Rows with a missing timestamp are dropped; rows where a given appliance
    reading is missing are dropped for that appliance only. Readings are
    sorted by time and exact-duplicate timestamps keep the last reading.
    """
    csv_path = Path(csv_path)
    try:
        frame = pd.read_csv(csv_path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise IoError(f"cannot read {csv_path}: {e}") from e
    if TIMESTAMP_COLUMN not in frame.columns:
        raise IoError(f"{csv_path} lacks required column {TIMESTAMP_COLUMN!r}")
    missing = sorted(set(column_map) - set(frame.columns))
    if missing:
        raise IoError(f"{csv_path} lacks mapped columns: {', '.join(missing)}")

    frame = frame.dropna(subset=[TIMESTAMP_COLUMN])
    out = []
    for column, label in sorted(column_map.items()):
        sub = frame[[TIMESTAMP_COLUMN, column]].dropna()
        sub = sub.sort_values(TIMESTAMP_COLUMN, kind="stable")
        sub = sub.drop_duplicates(subset=TIMESTAMP_COLUMN, keep="last")
        out.append(
            RawSeries(
                appliance_label=label,
                timestamps_s=sub[TIMESTAMP_COLUMN].to_numpy(dtype="float64"),
                power_w=sub[column].to_numpy(dtype="float64"),
            )
        )
    return out
