"""Sweep toy-run sizings to find a config meeting every desk-scale target."""

import statistics
import time
from collections import defaultdict
from pathlib import Path

import numpy as np

from powergan.cli.toy import make_toy_dataset
from powergan.data_pipeline.pgw import read_dataset
from powergan.evaluation import (
    ClassifierConfig,
    classifier_features,
    frechet_distance,
    predict_proba,
    train_classifier,
)
from powergan.evaluation.report import denormalized_stacks
from powergan.losses import LossConfig
from powergan.nets import NetConfig
from powergan.synthesis import GenerationRequest, amplitude_matched_noise, generate_with_stats
from powergan.trainer import TrainingData, TrainingSchedule, load_checkpoint, train

VARIANTS = [
    ("D_ev64_z64_f24", 64, 64, 24),
    ("F_ev64_z64_f16", 64, 64, 16),
    ("E_ev96_z64_f24", 96, 64, 24),
]


def global_dw_medians(rows):
    by = defaultdict(list)
    for r in rows:
        by[(r["stage"], r["epoch"])].append(abs(r["D_W"]))
    keys = sorted(by)
    k = max(1, len(keys) // 10)
    first = [v for key in keys[:k] for v in by[key]]
    last = [v for key in keys[-k:] for v in by[key]]
    return statistics.median(first), statistics.median(last)


for name, events, n_z, feats in VARIANTS:
    t0 = time.time()
    root = Path("/tmp/sweep") / name
    root.mkdir(parents=True, exist_ok=True)
    make_toy_dataset(root / "toy", seed=7, events_per_class=events)
    stacks, manifest = read_dataset(root / "toy" / "windows")
    data = TrainingData.from_stacks(stacks)
    net = NetConfig(n_z=n_z, n_classes=2, n_stages=3, base_features=feats)
    sched = TrainingSchedule(
        n_stages=3, epochs_per_stage=200, fade_epochs=100, batch_size=32,
        checkpoint_every=200, seed=7,
    )
    ckpt_path, rows = train(data, sched, net, LossConfig(), root / "run", normalization=manifest)
    t_train = time.time() - t0
    med_first, med_last = global_dw_medians(rows)

    ckpt = load_checkpoint(ckpt_path)
    gen, rates = {}, {}
    for label in ("spike_train", "square_wave"):
        windows, stats = generate_with_stats(ckpt, GenerationRequest(label=label, count=64, seed=21))
        gen[label] = np.stack([w.samples for w in windows])
        rates[label] = stats["rejection_rate"]

    real = denormalized_stacks(root / "toy" / "windows")
    model, summary = train_classifier(
        real, seed=5, config=ClassifierConfig(n_classes=2, base_channels=8, embedding_dim=64), epochs=30,
    )
    label_names = summary["label_names"]
    correct = total = 0
    for label, rowsg in gen.items():
        probs = predict_proba(model, rowsg)
        correct += int((probs.argmax(axis=1) == label_names.index(label)).sum())
        total += rowsg.shape[0]
    cond = correct / total

    real_all = np.concatenate([real[k] for k in sorted(real)])
    fake_all = np.concatenate([gen[k] for k in sorted(gen)])
    noise = amplitude_matched_noise(real_all, fake_all.shape[0], seed=99)
    fr = classifier_features(model, real_all)
    fid_gen = frechet_distance(fr, classifier_features(model, fake_all))
    fid_noise = frechet_distance(fr, classifier_features(model, noise))

    ok = (med_last < med_first) and cond >= 0.80 and fid_gen < fid_noise and max(rates.values()) < 0.5
    print(
        f"{name}: train {t_train:.0f}s total {time.time()-t0:.0f}s | "
        f"dW {med_first:.3f}->{med_last:.3f} | rej {max(rates.values()):.2f} | "
        f"holdout {summary['holdout_accuracy']:.2f} cond {cond:.3f} | "
        f"FID {fid_gen:.1f} vs noise {fid_noise:.1f} | PASS={ok}",
        flush=True,
    )
