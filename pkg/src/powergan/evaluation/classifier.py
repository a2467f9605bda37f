"""1-D residual classifier over appliance windows.

Backbone: a convolutional stem, then residual blocks with stride-2
downsampling and channel doubling (capped at the embedding width), global
average pooling to the embedding, and a linear class head. The embedding
(penultimate layer) doubles as the feature space for distribution metrics.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import nn

from powergan.data_pipeline.batches import circular_shift
from powergan.errors import InsufficientClasses, IncompatibleCheckpoint, IoError
from powergan.seeds import substream, substream_int

WATT_SCALE = 1e-3  # network inputs are watts / 1000, keeping values O(1)


@dataclass(frozen=True)
class ClassifierConfig:
    n_classes: int
    base_channels: int = 16
    embedding_dim: int = 128
    n_blocks: int = 6
    kernel_size: int = 9

    def __post_init__(self):
        if self.n_classes < 2:
            raise InsufficientClasses("classifier needs at least 2 classes")
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd")

    def channels_at(self, block: int) -> int:
        return min(self.base_channels * 2**block, self.embedding_dim)

    def to_dict(self) -> dict:
        return {
            "n_classes": self.n_classes,
            "base_channels": self.base_channels,
            "embedding_dim": self.embedding_dim,
            "n_blocks": self.n_blocks,
            "kernel_size": self.kernel_size,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClassifierConfig":
        return cls(**d)


class ResidualBlock(nn.Module):
    def __init__(self, in_ch: int, out_ch: int, kernel: int):
        super().__init__()
        pad = kernel // 2
        self.conv1 = nn.Conv1d(in_ch, out_ch, kernel, stride=2, padding=pad, bias=False)
        self.bn1 = nn.BatchNorm1d(out_ch)
        self.conv2 = nn.Conv1d(out_ch, out_ch, kernel, padding=pad, bias=False)
        self.bn2 = nn.BatchNorm1d(out_ch)
        self.skip = nn.Sequential(
            nn.Conv1d(in_ch, out_ch, 1, stride=2, bias=False),
            nn.BatchNorm1d(out_ch),
        )

    def forward(self, x):
        h = F.relu(self.bn1(self.conv1(x)))
        h = self.bn2(self.conv2(h))
        return F.relu(h + self.skip(x))


class WindowClassifier(nn.Module):
    def __init__(self, config: ClassifierConfig):
        super().__init__()
        self.config = config
        k, pad = config.kernel_size, config.kernel_size // 2
        self.stem = nn.Sequential(
            nn.Conv1d(1, config.base_channels, k, padding=pad, bias=False),
            nn.BatchNorm1d(config.base_channels),
            nn.ReLU(),
        )
        blocks = []
        ch = config.base_channels
        for b in range(config.n_blocks):
            nxt = config.channels_at(b)
            blocks.append(ResidualBlock(ch, nxt, k))
            ch = nxt
        self.blocks = nn.Sequential(*blocks)
        self.head = nn.Linear(ch, config.n_classes)

    def embed(self, x: torch.Tensor) -> torch.Tensor:
        """(B, L) watts -> (B, E) penultimate embeddings."""
        h = self.stem(x.unsqueeze(1) * WATT_SCALE)
        h = self.blocks(h)
        return h.mean(dim=2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.head(self.embed(x))


def _stack_corpus(stacks: dict[str, np.ndarray], label_names: list[str]) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    for i, name in enumerate(label_names):
        if name in stacks and stacks[name].shape[0]:
            xs.append(np.asarray(stacks[name], dtype=np.float32))
            ys.append(np.full(stacks[name].shape[0], i, dtype=np.int64))
    return np.concatenate(xs), np.concatenate(ys)


def train_classifier(
    stacks: dict[str, np.ndarray],
    seed: int,
    extra_stacks: list[dict[str, np.ndarray]] = (),
    config: ClassifierConfig | None = None,
    epochs: int = 40,
    batch_size: int = 32,
    lr: float = 1e-3,
    val_fraction: float = 0.2,
    label_smoothing: float = 0.1,
) -> tuple[WindowClassifier, dict]:
    """Supervised training on watt-domain windows; returns (model, summary).

    stacks maps label -> (count, length) arrays. Extra corpora are merged
    into training only (never the holdout). Windows get a random circular
    shift each epoch, matching the augmentation the synthesis task uses.
    """
    label_names = sorted(stacks)
    if len(label_names) < 2:
        raise InsufficientClasses(f"need >= 2 classes, got {label_names}")
    config = config or ClassifierConfig(n_classes=len(label_names))
    if config.n_classes != len(label_names):
        raise InsufficientClasses(
            f"config expects {config.n_classes} classes, corpus has {len(label_names)}"
        )

    split_rng = substream(seed, "classifier-split")
    train_x, train_y, val_x, val_y = [], [], [], []
    for i, name in enumerate(label_names):
        rows = np.asarray(stacks[name], dtype=np.float32)
        order = split_rng.permutation(rows.shape[0])
        n_val = max(1, int(round(val_fraction * rows.shape[0])))
        val_x.append(rows[order[:n_val]])
        val_y.append(np.full(n_val, i, dtype=np.int64))
        train_x.append(rows[order[n_val:]])
        train_y.append(np.full(rows.shape[0] - n_val, i, dtype=np.int64))
    for extra in extra_stacks:
        ex, ey = _stack_corpus(extra, label_names)
        train_x.append(ex)
        train_y.append(ey)
    x_train = np.concatenate(train_x)
    y_train = np.concatenate(train_y)
    x_val = torch.from_numpy(np.concatenate(val_x))
    y_val = torch.from_numpy(np.concatenate(val_y))

    torch.manual_seed(substream_int(seed, "classifier-init"))
    model = WindowClassifier(config)
    opt = torch.optim.Adam(model.parameters(), lr=lr)
    for ep in range(epochs):
        ep_rng = substream(seed, "classifier-epoch", ep)
        order = ep_rng.permutation(x_train.shape[0])
        shifted = circular_shift(x_train[order], ep_rng.integers(0, x_train.shape[1], size=order.size))
        labels = y_train[order]
        model.train()
        for lo in range(0, order.size, batch_size):
            xb = torch.from_numpy(np.ascontiguousarray(shifted[lo : lo + batch_size]))
            yb = torch.from_numpy(labels[lo : lo + batch_size])
            loss = F.cross_entropy(model(xb), yb, label_smoothing=label_smoothing)
            opt.zero_grad(set_to_none=True)
            loss.backward()
            opt.step()

    model.eval()
    with torch.no_grad():
        pred = model(x_val).argmax(dim=1)
    accuracy = float((pred == y_val).float().mean())
    summary = {
        "holdout_accuracy": accuracy,
        "n_train": int(x_train.shape[0]),
        "n_val": int(x_val.shape[0]),
        "label_names": label_names,
        "epochs": epochs,
    }
    return model, summary


def predict_proba(model: WindowClassifier, windows: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """(N, L) watts -> (N, C) softmax probabilities."""
    model.eval()
    outs = []
    with torch.no_grad():
        for lo in range(0, windows.shape[0], batch_size):
            xb = torch.from_numpy(np.asarray(windows[lo : lo + batch_size], dtype=np.float32))
            outs.append(F.softmax(model(xb), dim=1).numpy())
    return np.concatenate(outs).astype(np.float64)


def classifier_features(model: WindowClassifier, windows: np.ndarray, batch_size: int = 256) -> np.ndarray:
    """(N, L) watts -> (N, E) embedding features."""
    model.eval()
    outs = []
    with torch.no_grad():
        for lo in range(0, windows.shape[0], batch_size):
            xb = torch.from_numpy(np.asarray(windows[lo : lo + batch_size], dtype=np.float32))
            outs.append(model.embed(xb).numpy())
    return np.concatenate(outs).astype(np.float64)


def save_classifier(model: WindowClassifier, label_names: list[str], directory) -> Path:
    """Persist as named arrays plus a JSON manifest (same idea as checkpoints)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    arrays = {name: tensor.detach().cpu().numpy() for name, tensor in model.state_dict().items()}
    np.savez(directory / "classifier.npz", **arrays)
    manifest = {
        "format": "powergan-classifier",
        "version": 1,
        "config": model.config.to_dict(),
        "label_names": list(label_names),
    }
    with open(directory / "manifest.json", "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return directory


def load_classifier(directory) -> tuple[WindowClassifier, list[str]]:
    directory = Path(directory)
    try:
        with open(directory / "manifest.json") as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read classifier manifest in {directory}: {e}") from e
    if manifest.get("format") != "powergan-classifier":
        raise IncompatibleCheckpoint(f"{directory} is not a classifier directory")
    model = WindowClassifier(ClassifierConfig.from_dict(manifest["config"]))
    try:
        with np.load(directory / "classifier.npz") as arrays:
            state = {k: torch.from_numpy(arrays[k].copy()) for k in arrays.files}
    except OSError as e:
        raise IoError(f"cannot read classifier arrays: {e}") from e
    model.load_state_dict(state)
    model.eval()
    return model, list(manifest["label_names"])
