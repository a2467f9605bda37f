"""Shared fixtures: one desk-scale end-to-end training run.

The run is expensive (a few minutes on one CPU core), so it is built once
per session and shared by every test that needs a trained checkpoint,
generated samples, or the loss log.
"""

import time
from types import SimpleNamespace

import numpy as np
import pytest

TOY_SEED = 7
TOY_EVENTS_PER_CLASS = 64
GENERATED_PER_CLASS = 64


@pytest.fixture(scope="session")
def toy_run(tmp_path_factory):
    from powergan.cli.toy import make_toy_dataset
    from powergan.data_pipeline import read_dataset
    from powergan.evaluation import ClassifierConfig, denormalized_stacks, train_classifier
    from powergan.losses import LossConfig
    from powergan.nets import NetConfig
    from powergan.synthesis import GenerationRequest, generate_with_stats
    from powergan.trainer import TrainingData, TrainingSchedule, load_checkpoint, train

    root = tmp_path_factory.mktemp("toy_run")
    make_toy_dataset(root / "toy", seed=TOY_SEED, events_per_class=TOY_EVENTS_PER_CLASS)
    stacks, manifest = read_dataset(root / "toy" / "windows")
    net = NetConfig(n_z=32, n_classes=2, n_stages=3, base_features=16)
    schedule = TrainingSchedule(
        n_stages=3, epochs_per_stage=200, fade_epochs=100, batch_size=32,
        checkpoint_every=200, seed=TOY_SEED,
    )
    t0 = time.monotonic()
    ckpt_path, rows = train(
        TrainingData.from_stacks(stacks), schedule, net, LossConfig(),
        root / "run", normalization=manifest,
    )
    wall_s = time.monotonic() - t0

    checkpoint = load_checkpoint(ckpt_path)
    real = denormalized_stacks(root / "toy" / "windows")
    classifier, summary = train_classifier(
        real, seed=5,
        config=ClassifierConfig(n_classes=2, base_channels=8, embedding_dim=64),
        epochs=30,
    )
    generated, gen_stats = {}, {}
    for label in sorted(real):
        wins, stats = generate_with_stats(
            checkpoint, GenerationRequest(label=label, count=GENERATED_PER_CLASS, seed=21)
        )
        generated[label] = np.stack([w.samples for w in wins])
        gen_stats[label] = stats

    return SimpleNamespace(
        root=root,
        rows=rows,
        wall_s=wall_s,
        checkpoint=checkpoint,
        real=real,
        classifier=classifier,
        label_names=summary["label_names"],
        classifier_summary=summary,
        generated=generated,
        gen_stats=gen_stats,
    )
