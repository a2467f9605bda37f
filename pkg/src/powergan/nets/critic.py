"""Progressively growing conditional critic.

Mirrors the generator: a width-1 "from series" head per stage lifts the
conditioned (1 + C channel) input to features, blocks apply two
weight-scaled convolutions then max-pool by 2, and the final stage appends
the minibatch std channel before flattening to one unbounded score. During
fading the new block's output features are mixed with the previous head's
features before entering the already trained blocks.
"""

import torch
import torch.nn.functional as F
from torch import nn

from powergan.errors import InvalidShape, InvalidStage
from powergan.nets.config import NetConfig
from powergan.nets.conditioning import condition_critic_input
from powergan.nets.layers import WSConv1d, WSLinear, append_minibatch_stddev


class CriticBlock(nn.Module):
    """Two conv/lrelu rounds then max-pool x2."""

    def __init__(self, in_features: int, out_features: int, cfg: NetConfig):
        super().__init__()
        pad = cfg.kernel_size // 2
        self.conv1 = WSConv1d(in_features, in_features, cfg.kernel_size, padding=pad)
        self.conv2 = WSConv1d(in_features, out_features, cfg.kernel_size, padding=pad)
        self.slope = cfg.leaky_slope

    def forward(self, x):
        x = F.leaky_relu(self.conv1(x), self.slope)
        x = F.leaky_relu(self.conv2(x), self.slope)
        return F.max_pool1d(x, 2)


class CriticFinal(nn.Module):
    """Minibatch std, one conv round, then flatten to a scalar score."""

    def __init__(self, cfg: NetConfig):
        super().__init__()
        f = cfg.input_stage_features
        self.conv = WSConv1d(f + 1, f, cfg.kernel_size, padding=cfg.kernel_size // 2)
        self.fc = WSLinear(f * cfg.base_length, 1)
        self.slope = cfg.leaky_slope
        self.eps = cfg.mbstd_epsilon

    def forward(self, x):
        x = append_minibatch_stddev(x, self.eps)
        x = F.leaky_relu(self.conv(x), self.slope)
        return self.fc(x.flatten(1)).squeeze(1)


class Critic(nn.Module):
    def __init__(self, config: NetConfig, stage: int = 1):
        super().__init__()
        if not 1 <= stage <= config.n_stages:
            raise InvalidStage(f"stage {stage} outside 1..{config.n_stages}")
        self.config = config
        self.stage = stage
        # heads[i] and blocks[i-1] belong to stage i+1; block of stage s maps
        # stage-s features down to stage-(s-1) features at half length.
        self.heads = nn.ModuleList([WSConv1d(1 + config.n_classes, config.input_stage_features, 1)])
        self.blocks = nn.ModuleList()
        self.final = CriticFinal(config)
        for s in range(2, stage + 1):
            self._append_stage(s)

    def _append_stage(self, s: int):
        cfg = self.config
        self.heads.append(WSConv1d(1 + cfg.n_classes, cfg.features_at(s), 1))
        self.blocks.append(CriticBlock(cfg.features_at(s), cfg.features_at(s - 1), cfg))

    def grow(self) -> list[nn.Parameter]:
        """Add the next stage's head and block; returns the new parameters."""
        if self.stage >= self.config.n_stages:
            raise InvalidStage(f"cannot grow past stage {self.config.n_stages}")
        before = {id(p) for p in self.parameters()}
        self._append_stage(self.stage + 1)
        self.stage += 1
        return [p for p in self.parameters() if id(p) not in before]

    @property
    def input_length(self) -> int:
        return self.config.length_at(self.stage)

    def fade_features(self, conditioned: torch.Tensor, alpha: float) -> torch.Tensor:
        """Features entering the trained blocks: alpha-mix of the new block's
        output with the previous head applied to the pooled input. Affine in
        alpha by construction."""
        if self.stage == 1:
            return F.leaky_relu(self.heads[0](conditioned), self.config.leaky_slope)
        new = self.blocks[self.stage - 2](
            F.leaky_relu(self.heads[self.stage - 1](conditioned), self.config.leaky_slope)
        )
        if alpha >= 1.0:
            return new
        old = F.leaky_relu(self.heads[self.stage - 2](F.max_pool1d(conditioned, 2)), self.config.leaky_slope)
        if alpha <= 0.0:
            return old
        return alpha * new + (1.0 - alpha) * old

    def forward(self, x: torch.Tensor, labels: torch.Tensor, alpha: float = 1.0) -> torch.Tensor:
        """(B, 1, L_stage) signals + (B,) labels -> (B,) scores."""
        expected = self.input_length
        if x.ndim != 3 or x.shape[1] != 1 or x.shape[2] != expected:
            raise InvalidShape(f"expected (B, 1, {expected}), got {tuple(x.shape)}")
        conditioned = condition_critic_input(x, labels, self.config.n_classes)
        h = self.fade_features(conditioned, alpha)
        for s in range(self.stage - 1, 1, -1):
            h = self.blocks[s - 2](h)
        return self.final(h)
