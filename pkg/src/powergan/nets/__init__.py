"""Conditional progressively growing generator and critic."""

from powergan.nets.conditioning import condition_critic_input, embed_latent
from powergan.nets.config import NetConfig, StageState
from powergan.nets.critic import Critic
from powergan.nets.generator import Generator
from powergan.nets.layers import (
    PixelNorm,
    WSConv1d,
    WSLinear,
    append_minibatch_stddev,
    minibatch_stddev_feature,
    pixelwise_feature_norm,
    upsample_nn,
)

__all__ = [
    "Critic",
    "Generator",
    "NetConfig",
    "PixelNorm",
    "StageState",
    "WSConv1d",
    "WSLinear",
    "append_minibatch_stddev",
    "condition_critic_input",
    "embed_latent",
    "minibatch_stddev_feature",
    "pixelwise_feature_norm",
    "upsample_nn",
]
