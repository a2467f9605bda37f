"""Corpus scoring: classifier, IS, FID, SWD, Laplacian features."""

from powergan.evaluation.classifier import (
    ClassifierConfig,
    WindowClassifier,
    classifier_features,
    load_classifier,
    predict_proba,
    save_classifier,
    train_classifier,
)
from powergan.evaluation.frechet import frechet_distance
from powergan.evaluation.inception import inception_score
from powergan.evaluation.laplacian import (
    LaplacianTriangle,
    build_triangle,
    gaussian_kernel,
    laplacian_features,
    reconstruct,
)
from powergan.evaluation.report import (
    MetricReport,
    compute_metrics,
    denormalized_stacks,
    evaluate_corpora,
)
from powergan.evaluation.swd import sliced_wasserstein

__all__ = [
    "ClassifierConfig",
    "LaplacianTriangle",
    "MetricReport",
    "WindowClassifier",
    "build_triangle",
    "classifier_features",
    "compute_metrics",
    "denormalized_stacks",
    "evaluate_corpora",
    "frechet_distance",
    "gaussian_kernel",
    "inception_score",
    "laplacian_features",
    "load_classifier",
    "predict_proba",
    "reconstruct",
    "save_classifier",
    "sliced_wasserstein",
    "train_classifier",
]
