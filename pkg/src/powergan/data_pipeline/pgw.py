"""PGW1 container: fixed-length float32 window stacks, one file per label.

Layout: magic "PGW1", uint32 window_length, uint32 window_count, then
count*length float32 samples, row-major, all little-endian. A dataset
directory holds <label>.pgw files plus normalization.json with the scale
constants needed to map [0, 1] windows back to watts.
"""

import json
import struct
from pathlib import Path

import numpy as np

from powergan.data_pipeline.windows import NormalizationManifest, Window
from powergan.errors import IoError

MAGIC = b"PGW1"
_HEADER = struct.Struct("<4sII")
MANIFEST_NAME = "normalization.json"


def write_pgw(path, rows: np.ndarray) -> None:
    """Write a (count, length) float32 stack to one PGW1 file."""
    rows = np.ascontiguousarray(rows, dtype="<f4")
    if rows.ndim != 2 or 0 in rows.shape:
        raise ValueError("PGW1 payload must be a non-empty 2-D (count, length) stack")
    path = Path(path)
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, rows.shape[1], rows.shape[0]))
        f.write(rows.tobytes(order="C"))


def read_pgw(path) -> np.ndarray:
    """Read one PGW1 file back into a (count, length) float32 array."""
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise IoError(f"cannot read {path}: {e}") from e
    if len(blob) < _HEADER.size:
        raise IoError(f"{path}: truncated header")
    magic, length, count = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise IoError(f"{path}: bad magic {magic!r}")
    expected = _HEADER.size + 4 * length * count
    if len(blob) != expected:
        raise IoError(f"{path}: size {len(blob)} != expected {expected}")
    data = np.frombuffer(blob, dtype="<f4", offset=_HEADER.size)
    return data.reshape(count, length).copy()


def _label_filename(label: str) -> str:
    if not label or "/" in label or "\\" in label or label.startswith("."):
        raise ValueError(f"label {label!r} is not a safe filename stem")
    return f"{label}.pgw"


def write_dataset(directory, windows: list[Window], manifest: NormalizationManifest) -> dict[str, Path]:
    """Write per-label PGW1 files plus normalization.json; returns the paths.

    Window order within each label is preserved as given.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    by_label: dict[str, list[np.ndarray]] = {}
    for w in windows:
        if w.samples.size != manifest.window_length:
            raise ValueError(
                f"window length {w.samples.size} != manifest {manifest.window_length}"
            )
        by_label.setdefault(w.label, []).append(w.samples)
    paths = {}
    for label in sorted(by_label):
        p = directory / _label_filename(label)
        write_pgw(p, np.stack(by_label[label]))
        paths[label] = p
    with open(directory / MANIFEST_NAME, "w") as f:
        json.dump(manifest.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    return paths


def read_dataset(directory) -> tuple[dict[str, np.ndarray], NormalizationManifest]:
    """Load every <label>.pgw in a dataset directory plus its manifest."""
    directory = Path(directory)
    manifest_path = directory / MANIFEST_NAME
    try:
        with open(manifest_path) as f:
            manifest = NormalizationManifest.from_dict(json.load(f))
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise IoError(f"cannot read {manifest_path}: {e}") from e
    stacks = {}
    for p in sorted(directory.glob("*.pgw")):
        rows = read_pgw(p)
        if rows.shape[1] != manifest.window_length:
            raise IoError(f"{p}: window length {rows.shape[1]} != manifest {manifest.window_length}")
        stacks[p.stem] = rows
    if not stacks:
        raise IoError(f"no .pgw files under {directory}")
    return stacks, manifest
