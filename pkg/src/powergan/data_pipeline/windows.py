"""Activation windowing, energy/sparsity filtering, balancing, normalization.

Windows are fixed-length power traces cut around detected activations.
Filtering keeps windows whose above-steady-state energy clears a watt-hour
threshold and whose first-difference Hoyer sparsity is high enough to carry
structure rather than noise.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from powergan.errors import EmptyClass, SeriesTooShort
from powergan.seeds import substream

SAMPLE_PERIOD_S = 8.0

# Documented label vocabulary for the real corpus; the pipeline itself
# accepts any label strings supplied by the column map.
CANONICAL_LABELS = ("fridge", "washing_machine", "tumble_dryer", "dishwasher", "microwave")


@dataclass(frozen=True)
class FilterParams:
    """Thresholds for activation detection and window filtering."""

    activation_edge_watts: float = 50.0
    energy_threshold_wh: float = 33.33
    sparsity_min: float = 0.5

    def __post_init__(self):
        if self.activation_edge_watts <= 0 or self.energy_threshold_wh <= 0:
            raise ValueError("thresholds must be positive")
        if not 0.0 <= self.sparsity_min <= 1.0:
            raise ValueError("sparsity_min must lie in [0, 1]")


@dataclass
class Window:
    """A fixed-length labeled power trace."""

    label: str
    samples: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        if self.samples.ndim != 1:
            raise ValueError("window samples must be one-dimensional")


@dataclass
class NormalizationManifest:
    """Per-label scale constants plus the window geometry they apply to."""

    scales: dict[str, float]
    window_length: int
    sample_period_s: float = SAMPLE_PERIOD_S
    # Filter thresholds echoed for downstream consumers (generation re-checks
    # the same energy rule); not part of the normalization itself.
    filter: dict = field(default_factory=dict)

    @property
    def labels(self) -> list[str]:
        return sorted(self.scales)

    def to_dict(self) -> dict:
        return {
            "scales": {k: float(v) for k, v in sorted(self.scales.items())},
            "window_length": int(self.window_length),
            "sample_period_s": float(self.sample_period_s),
            "filter": dict(self.filter),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationManifest":
        return cls(
            scales=dict(d["scales"]),
            window_length=int(d["window_length"]),
            sample_period_s=float(d.get("sample_period_s", SAMPLE_PERIOD_S)),
            filter=dict(d.get("filter", {})),
        )


def _samples_of(window) -> np.ndarray:
    samples = window.samples if isinstance(window, Window) else window
    return np.asarray(samples, dtype=np.float64)


def detect_activations(series, params: FilterParams) -> np.ndarray:
    """Indices i where |power[i] - power[i-1]| exceeds the edge threshold."""
    power = np.asarray(getattr(series, "power", series), dtype=np.float64)
    if power.size < 2:
        return np.empty(0, dtype=np.int64)
    edges = np.abs(np.diff(power)) > params.activation_edge_watts
    return np.flatnonzero(edges).astype(np.int64) + 1


def cut_windows(series, activations, n: int) -> list[Window]:
    """Cut length-n windows centered on activations, clamped at boundaries.

    Activations falling inside an already-emitted window are suppressed, so
    dense activation clusters yield one window (earliest activation wins).
    """
    power = np.asarray(getattr(series, "power", series), dtype=np.float32)
    label = getattr(series, "label", getattr(series, "appliance_label", ""))
    if power.size < n:
        raise SeriesTooShort(f"series has {power.size} samples, window needs {n}")
    half = n // 2
    out = []
    last_end = 0
    for a in np.asarray(activations, dtype=np.int64):
        if out and a < last_end:
            continue
        start = int(min(max(a - half, 0), power.size - n))
        out.append(Window(label=label, samples=power[start : start + n].copy()))
        last_end = start + n
    return out


def window_energy_above_steady(window, sample_period_s: float = SAMPLE_PERIOD_S) -> float:
    """Watt-hours carried by samples at or above mean + 0.5*std of the window.

    Samples below that steady-state level contribute nothing; qualifying
    samples contribute their full value.
    """
    x = _samples_of(window)
    if x.size == 0:
        return 0.0
    level = x.mean() + 0.5 * x.std()
    return float(x[x >= level].sum() * (sample_period_s / 3600.0))


def hoyer_sparsity(window) -> float:
    """Hoyer sparsity of the window's first-order differences, in [0, 1].

    1 = a single nonzero difference; 0 = all differences equal (including
    the degenerate constant window, whose difference vector is zero).
    """
    x = _samples_of(window)
    if x.size < 2:
        raise ValueError("window needs at least 2 samples")
    delta = np.diff(x)
    l2 = math.sqrt(float((delta * delta).sum()))
    if l2 == 0.0:
        return 0.0
    n = delta.size
    if n == 1:
        return 1.0
    l1 = float(np.abs(delta).sum())
    return (math.sqrt(n) - l1 / l2) / (math.sqrt(n) - 1.0)


def filter_windows(windows, params: FilterParams, sample_period_s: float = SAMPLE_PERIOD_S) -> list[Window]:
    """Keep windows passing both the energy and the sparsity condition."""
    kept = []
    for w in windows:
        if isinstance(w, Window) and w.normalized:
            raise ValueError("filter_windows expects unnormalized windows (watt units)")
        if window_energy_above_steady(w, sample_period_s) < params.energy_threshold_wh:
            continue
        if hoyer_sparsity(w) <= params.sparsity_min:
            continue
        kept.append(w)
    return kept


def balance_and_normalize(
    windows,
    seed: int,
    labels=None,
    sample_period_s: float = SAMPLE_PERIOD_S,
    filter_params: FilterParams | None = None,
) -> tuple[list[Window], NormalizationManifest]:
    """Undersample each label to the smallest class, then scale to [0, 1].

    The per-label scale is the maximum sample over that label's selected
    windows, so each class touches 1.0 somewhere. Selection is a seeded
    uniform choice without replacement and is reproducible from the seed.
    """
    by_label: dict[str, list[Window]] = {}
    for w in windows:
        by_label.setdefault(w.label, []).append(w)
    expected = sorted(labels) if labels is not None else sorted(by_label)
    for lab in expected:
        if not by_label.get(lab):
            raise EmptyClass(f"label {lab!r} has no accepted windows")
    if not expected:
        raise EmptyClass("no windows at all")

    lengths = {w.samples.size for group in by_label.values() for w in group}
    if len(lengths) != 1:
        raise ValueError(f"mixed window lengths: {sorted(lengths)}")

    rng = substream(seed, "balance")
    min_count = min(len(by_label[lab]) for lab in expected)
    selected: list[Window] = []
    scales: dict[str, float] = {}
    for lab in expected:
        group = by_label[lab]
        idx = np.sort(rng.choice(len(group), size=min_count, replace=False))
        chosen = [group[i] for i in idx]
        scale = float(max(np.max(w.samples) for w in chosen))
        if scale <= 0:
            raise EmptyClass(f"label {lab!r} has only non-positive samples")
        scales[lab] = scale
        for w in chosen:
            selected.append(Window(lab, (w.samples / np.float32(scale)).astype(np.float32), normalized=True))

    manifest = NormalizationManifest(
        scales=scales,
        window_length=int(lengths.pop()),
        sample_period_s=sample_period_s,
        filter={
            "activation_edge_watts": filter_params.activation_edge_watts,
            "energy_threshold_wh": filter_params.energy_threshold_wh,
            "sparsity_min": filter_params.sparsity_min,
        }
        if filter_params
        else {},
    )
    return selected, manifest
