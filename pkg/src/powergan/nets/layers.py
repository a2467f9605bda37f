"""Building blocks: weight-scaled conv/linear, pixel norm, resampling, mbstd.

Weight scaling keeps stored parameters at unit normal and multiplies by
sqrt(2/fan_in) on every use, so the optimizer sees comparably scaled
gradients across layers without careful initialization.
"""

import math

import torch
import torch.nn.functional as F
from torch import nn


class WSConv1d(nn.Module):
    """Conv1d whose effective weight is the stored weight times sqrt(2/fan_in)."""

    def __init__(self, in_channels: int, out_channels: int, kernel_size: int, padding: int = 0):
        super().__init__()
        self.weight = nn.Parameter(torch.randn(out_channels, in_channels, kernel_size))
        self.bias = nn.Parameter(torch.zeros(out_channels))
        self.scale = math.sqrt(2.0 / (in_channels * kernel_size))
        self.padding = padding

    def forward(self, x):
        return F.conv1d(x, self.weight * self.scale, self.bias, padding=self.padding)


class WSLinear(nn.Module):
    """Linear layer with the same on-line sqrt(2/fan_in) weight scaling."""

    def __init__(self, in_features: int, out_features: int):
        super().__init__()
        self.weight = nn.Parameter(torch.randn(out_features, in_features))
        self.bias = nn.Parameter(torch.zeros(out_features))
        self.scale = math.sqrt(2.0 / in_features)

    def forward(self, x):
        return F.linear(x, self.weight * self.scale, self.bias)


def pixelwise_feature_norm(x: torch.Tensor, epsilon: float = 1e-8) -> torch.Tensor:
    """Rescale each time step so the feature vector there has unit mean square."""
    return x * torch.rsqrt(x.pow(2).mean(dim=1, keepdim=True) + epsilon)


class PixelNorm(nn.Module):
    def __init__(self, epsilon: float = 1e-8):
        super().__init__()
        self.epsilon = epsilon

    def forward(self, x):
        return pixelwise_feature_norm(x, self.epsilon)


def upsample_nn(x: torch.Tensor) -> torch.Tensor:
    """Nearest-neighbour doubling along time: out[2i] = out[2i+1] = x[i]."""
    return torch.repeat_interleave(x, 2, dim=-1)


def minibatch_stddev_feature(batch: torch.Tensor, epsilon: float = 1e-8) -> torch.Tensor:
    """One scalar: per-(feature, time) std over the batch, averaged over both.

    The epsilon inside the square root keeps the gradient finite when a
    position is constant across the batch, at the cost of reading ~1e-4
    instead of exactly 0 for a fully degenerate batch.
    """
    if batch.ndim != 3:
        raise ValueError("expected (batch, features, time)")
    var = batch.var(dim=0, unbiased=False)
    return torch.sqrt(var + epsilon).mean()


def append_minibatch_stddev(batch: torch.Tensor, epsilon: float = 1e-8) -> torch.Tensor:
    """Append the minibatch std scalar as one constant channel per sample."""
    stat = minibatch_stddev_feature(batch, epsilon)
    channel = stat.expand(batch.shape[0], 1, batch.shape[2])
    return torch.cat([batch, channel], dim=1)
