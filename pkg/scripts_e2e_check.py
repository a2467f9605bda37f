"""Dry run of the desk-scale end-to-end acceptance flow, with timings."""

import json
import statistics
import time
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

t0 = time.time()
root = Path("/tmp/e2e")
root.mkdir(exist_ok=True)

toy = make_toy_dataset(root / "toy", seed=7)
print("toy:", toy["per_label"], f"{time.time()-t0:.1f}s", flush=True)

stacks, manifest = read_dataset(root / "toy" / "windows")
data = TrainingData.from_stacks(stacks)
net = NetConfig(n_z=32, n_classes=2, n_stages=3, base_features=16)
sched = TrainingSchedule(
    n_stages=3, epochs_per_stage=200, fade_epochs=100, batch_size=32,
    checkpoint_every=100, seed=7,
)
t1 = time.time()
ckpt_path, rows = train(data, sched, net, LossConfig(), root / "run", normalization=manifest)
t_train = time.time() - t1
print(f"train: {t_train:.1f}s, {len(rows)} iterations", flush=True)

# (a) |D_W| trend per stage
for stage in (1, 2, 3):
    eps = sorted({r["epoch"] for r in rows if r["stage"] == stage})
    k = max(1, len(eps) // 10)
    first, last = set(eps[:k]), set(eps[-k:])
    med_first = statistics.median(abs(r["D_W"]) for r in rows if r["stage"] == stage and r["epoch"] in first)
    med_last = statistics.median(abs(r["D_W"]) for r in rows if r["stage"] == stage and r["epoch"] in last)
    print(f"stage {stage}: median|D_W| first10% {med_first:.4f} last10% {med_last:.4f} ok={med_last < med_first}", flush=True)

# generation + rejection
ckpt = load_checkpoint(ckpt_path)
t2 = time.time()
gen = {}
rates = {}
for label in ("spike_train", "square_wave"):
    windows, stats = generate_with_stats(ckpt, GenerationRequest(label=label, count=64, seed=21))
    gen[label] = np.stack([w.samples for w in windows])
    rates[label] = stats["rejection_rate"]
print(f"generate: {time.time()-t2:.1f}s rejection: {rates}", flush=True)

# classifier on real toy data (watts)
real = denormalized_stacks(root / "toy" / "windows")
t3 = time.time()
cls_cfg = ClassifierConfig(n_classes=2, base_channels=8, embedding_dim=64)
model, summary = train_classifier(real, seed=5, config=cls_cfg, epochs=30)
print(f"classifier: {time.time()-t3:.1f}s holdout acc {summary['holdout_accuracy']:.3f}", flush=True)

# conditioning accuracy on generated
names = sorted(real)
correct = total = 0
for i, label in enumerate(names):
    probs = predict_proba(model, gen[label])
    correct += int((probs.argmax(axis=1) == i).sum())
    total += probs.shape[0]
print(f"conditioning accuracy: {correct/total:.3f}", flush=True)

# FID ordering
real_all = np.concatenate([real[k] for k in names])
fake_all = np.concatenate([gen[k] for k in names])
noise = amplitude_matched_noise(real_all, fake_all.shape[0], seed=99)
emb_r = classifier_features(model, real_all)
fid_gen = frechet_distance(emb_r, classifier_features(model, fake_all))
fid_noise = frechet_distance(emb_r, classifier_features(model, noise))
print(f"FID gen {fid_gen:.2f} vs noise {fid_noise:.2f} ok={fid_gen < fid_noise}", flush=True)
print(f"TOTAL {time.time()-t0:.1f}s", flush=True)
print(json.dumps({"train_s": t_train}), flush=True)
