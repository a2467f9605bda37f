"""End-to-end corpus scoring and the JSON metric report."""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from powergan.data_pipeline.pgw import read_dataset
from powergan.errors import EmptyCorpus, InvalidShape, IoError
from powergan.evaluation.classifier import (
    WindowClassifier,
    classifier_features,
    load_classifier,
    predict_proba,
)
from powergan.evaluation.frechet import frechet_distance
from powergan.evaluation.inception import inception_score
from powergan.evaluation.laplacian import laplacian_features
from powergan.evaluation.swd import sliced_wasserstein


@dataclass
class MetricReport:
    is_mean: float
    is_std: float
    fid: float
    swd_lap_mean: float
    swd_lap_std: float
    swd_cl_mean: float
    swd_cl_std: float
    # display convention: Laplacian SWD tabulated in units of 1e3
    swd_lap_mean_scaled: float
    n_real: int
    n_fake: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricReport":
        return cls(**d)

    def save(self, path) -> Path:
        path = Path(path)
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2, sort_keys=True)
            f.write("\n")
        return path

    @classmethod
    def load(cls, path) -> "MetricReport":
        try:
            with open(path) as f:
                return cls.from_dict(json.load(f))
        except (OSError, json.JSONDecodeError, TypeError) as e:
            raise IoError(f"cannot read report {path}: {e}") from e


def denormalized_stacks(directory) -> dict[str, np.ndarray]:
    """Load a PGW1 dataset and map stored values back to watts."""
    stacks, manifest = read_dataset(directory)
    return {
        label: rows * np.float32(manifest.scales.get(label, 1.0))
        for label, rows in stacks.items()
    }


def compute_metrics(
    real_stacks: dict[str, np.ndarray],
    fake_stacks: dict[str, np.ndarray],
    model: WindowClassifier,
    seed: int,
    iterations: int = 10,
    projections: int = 1000,
    config_echo: dict | None = None,
) -> MetricReport:
    """All four scores between two watt-domain corpora."""
    real = np.concatenate([real_stacks[k] for k in sorted(real_stacks)])
    fake = np.concatenate([fake_stacks[k] for k in sorted(fake_stacks)])
    if real.shape[0] == 0 or fake.shape[0] == 0:
        raise EmptyCorpus("both corpora must be non-empty")
    if real.shape[1] != fake.shape[1]:
        raise InvalidShape(f"window lengths differ: {real.shape[1]} vs {fake.shape[1]}")

    is_mean, is_std = inception_score(predict_proba(model, fake))
    emb_real = classifier_features(model, real)
    emb_fake = classifier_features(model, fake)
    fid = frechet_distance(emb_real, emb_fake)
    swd_cl_mean, swd_cl_std = sliced_wasserstein(
        emb_real, emb_fake, iterations=iterations, projections=projections, seed=seed
    )
    lap_real = laplacian_features(real, seed=seed)
    lap_fake = laplacian_features(fake, seed=seed + 1)
    swd_lap_mean, swd_lap_std = sliced_wasserstein(
        lap_real, lap_fake, iterations=iterations, projections=projections, seed=seed
    )
    return MetricReport(
        is_mean=is_mean,
        is_std=is_std,
        fid=fid,
        swd_lap_mean=swd_lap_mean,
        swd_lap_std=swd_lap_std,
        swd_cl_mean=swd_cl_mean,
        swd_cl_std=swd_cl_std,
        swd_lap_mean_scaled=swd_lap_mean / 1e3,
        n_real=int(real.shape[0]),
        n_fake=int(fake.shape[0]),
        config=dict(config_echo or {}),
    )


def evaluate_corpora(real_dir, fake_dir, classifier_dir, seed: int, out_path=None) -> MetricReport:
    """Score a generated corpus directory against a real one; optionally
    write the JSON report."""
    model, _ = load_classifier(classifier_dir)
    report = compute_metrics(
        denormalized_stacks(real_dir),
        denormalized_stacks(fake_dir),
        model,
        seed=seed,
        config_echo={
            "real_dir": str(real_dir),
            "fake_dir": str(fake_dir),
            "classifier": str(classifier_dir),
            "seed": int(seed),
        },
    )
    if out_path is not None:
        report.save(out_path)
    return report
