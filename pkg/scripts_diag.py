"""Dense-checkpoint diagnostic of the desk-scale run: when does conditioning
cross 0.8, and when does the score gap start running away?  Runs two dataset
sizings against the narrowed toy fixture."""

import statistics
import sys
import time
from collections import defaultdict
from pathlib import Path

import numpy as np

from powergan.cli.toy import make_toy_dataset
from powergan.data_pipeline.pgw import read_dataset
from powergan.evaluation import ClassifierConfig, predict_proba, train_classifier
from powergan.evaluation.report import denormalized_stacks
from powergan.losses import LossConfig
from powergan.nets import NetConfig
from powergan.synthesis import GenerationRequest, generate_with_stats
from powergan.trainer import TrainingData, TrainingSchedule, load_checkpoint, train


def mixed_epoch_batches(samples, label_ids, batch_size, factor, rng):
    from powergan.data_pipeline.batches import shift_and_pool

    order = rng.permutation(samples.shape[0])
    shifted = shift_and_pool(samples[order], factor, rng)
    labels = label_ids[order]
    for lo in range(0, order.size, batch_size):
        yield shifted[lo : lo + batch_size, None, :], labels[lo : lo + batch_size]


def run_arm(tag: str, events_per_class: int, seed: int, n_z: int = 32, feat: int = 16, mode: str = "single") -> None:
    import powergan.trainer.loop as loop_mod
    from powergan.data_pipeline.batches import epoch_batches as single_impl

    loop_mod.epoch_batches = mixed_epoch_batches if mode == "mix" else single_impl
    t0 = time.time()
    root = Path(f"/tmp/diag_{tag}")
    make_toy_dataset(root / "toy", seed=seed, events_per_class=events_per_class)
    stacks, manifest = read_dataset(root / "toy" / "windows")
    data = TrainingData.from_stacks(stacks)
    net = NetConfig(n_z=n_z, n_classes=2, n_stages=3, base_features=feat)
    sched = TrainingSchedule(
        n_stages=3, epochs_per_stage=200, fade_epochs=100, batch_size=32,
        checkpoint_every=25, seed=seed,
    )
    ckpt_path, rows = train(data, sched, net, LossConfig(), root / "run", normalization=manifest)
    print(f"[{tag}] train {time.time()-t0:.0f}s", flush=True)

    by = defaultdict(list)
    for r in rows:
        by[(r["stage"], r["epoch"])].append(abs(r["D_W"]))
    keys = sorted(by)
    k = len(keys) // 10
    first = statistics.median(v for key in keys[:k] for v in by[key])
    print(f"[{tag}] first10% median|D_W| {first:.3f}", flush=True)
    for i in range(0, len(keys), 50):
        chunk = [v for key in keys[i : i + 50] for v in by[key]]
        print(f"  ep {keys[i][0]}/{keys[i][1]:3d}+: |D_W| med {statistics.median(chunk):10.2f}")

    real = denormalized_stacks(root / "toy" / "windows")
    model, summary = train_classifier(
        real, seed=5, config=ClassifierConfig(n_classes=2, base_channels=8, embedding_dim=64), epochs=30,
    )
    label_names = summary["label_names"]
    print(f"[{tag}] classifier holdout {summary['holdout_accuracy']:.3f}", flush=True)

    for ep in (50, 100, 150, 200):
        cdir = root / "run" / f"ckpt_stage3_ep{ep}"
        if not cdir.exists():
            continue
        ckpt = load_checkpoint(cdir)
        per = {}
        rej = {}
        for label in label_names:
            try:
                windows, stats = generate_with_stats(ckpt, GenerationRequest(label=label, count=64, seed=21))
            except Exception as exc:
                per[label] = f"STARVED({exc})"
                rej[label] = 1.0
                continue
            rowsg = np.stack([w.samples for w in windows])
            probs = predict_proba(model, rowsg)
            acc = float((probs.argmax(axis=1) == label_names.index(label)).mean())
            per[label] = round(acc, 3)
            rej[label] = round(stats["rejection_rate"], 3)
        numeric = [v for v in per.values() if isinstance(v, float)]
        cond = sum(numeric) / len(numeric) if numeric else 0.0
        tail_keys = [key for key in keys if key <= (3, ep)]
        kk = len(tail_keys) // 10
        last = statistics.median(v for key in tail_keys[-kk:] for v in by[key])
        print(
            f"[{tag}] stage3 ep{ep}: cond {cond:.3f} per {per} rej {rej} "
            f"last10%|D_W| {last:.2f} (pass_a={last < first})",
            flush=True,
        )
    print(f"[{tag}] TOTAL {time.time()-t0:.0f}s", flush=True)


if __name__ == "__main__":
    for spec in sys.argv[1:]:
        parts = spec.split(":")
        tag, events, seed = parts[0], int(parts[1]), int(parts[2])
        n_z = int(parts[3]) if len(parts) > 3 else 32
        feat = int(parts[4]) if len(parts) > 4 else 16
        mode = parts[5] if len(parts) > 5 else "single"
        run_arm(tag, events, seed, n_z, feat, mode)
