"""Label conditioning for both nets.

Generator side: the latent vector is placed in column l of an N_z x C
matrix (zeros elsewhere), flattened. Critic side: C constant one-hot
channels are concatenated to the input signal.
"""

import torch
import torch.nn.functional as F

from powergan.errors import InvalidLabel


def _check_labels(labels: torch.Tensor, n_classes: int) -> torch.Tensor:
    labels = labels.long()
    if labels.numel() and (labels.min() < 0 or labels.max() >= n_classes):
        raise InvalidLabel(f"labels must lie in [0, {n_classes})")
    return labels


def embed_latent(z: torch.Tensor, labels: torch.Tensor, n_classes: int) -> torch.Tensor:
    """(B, N_z) latents + (B,) labels -> (B, N_z * C) flattened embeddings.

    Row-major flattening of the N_z x C matrix, so entries of z land at
    positions i*C + l.
    """
    if z.ndim != 2:
        raise ValueError("z must be (batch, n_z)")
    labels = _check_labels(labels, n_classes)
    onehot = F.one_hot(labels, n_classes).to(z.dtype)
    return (z.unsqueeze(2) * onehot.unsqueeze(1)).reshape(z.shape[0], -1)


def condition_critic_input(x: torch.Tensor, labels: torch.Tensor, n_classes: int) -> torch.Tensor:
    """(B, 1, L) signals + (B,) labels -> (B, 1 + C, L) conditioned input."""
    if x.ndim != 3 or x.shape[1] != 1:
        raise ValueError("x must be (batch, 1, length)")
    labels = _check_labels(labels, n_classes)
    onehot = F.one_hot(labels, n_classes).to(x.dtype)
    channels = onehot.unsqueeze(2).expand(-1, -1, x.shape[2])
    return torch.cat([x, channels], dim=1)
