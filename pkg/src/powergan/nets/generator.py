"""Progressively growing conditional generator.

Stage 1 is a fully connected map from the flattened conditioned latent to a
base_length feature map. Each later stage doubles the length: nearest
neighbour upsampling followed by two weight-scaled convolutions, each with
leaky activation and pixelwise feature normalization. A width-1 "to series"
head per stage projects features to one channel; during fading the new
head's output is mixed with the upsampled previous head's output.
"""

import torch
from torch import nn

from powergan.errors import InvalidStage
from powergan.nets.config import NetConfig
from powergan.nets.conditioning import embed_latent
from powergan.nets.layers import WSConv1d, WSLinear, pixelwise_feature_norm, upsample_nn


class GeneratorBlock(nn.Module):
    """Upsample x2 then two conv/lrelu/pixelnorm rounds."""

    def __init__(self, in_features: int, out_features: int, cfg: NetConfig):
        super().__init__()
        pad = cfg.kernel_size // 2
        self.conv1 = WSConv1d(in_features, out_features, cfg.kernel_size, padding=pad)
        self.conv2 = WSConv1d(out_features, out_features, cfg.kernel_size, padding=pad)
        self.slope = cfg.leaky_slope
        self.eps = cfg.pixelnorm_epsilon

    def forward(self, x):
        x = upsample_nn(x)
        x = pixelwise_feature_norm(nn.functional.leaky_relu(self.conv1(x), self.slope), self.eps)
        x = pixelwise_feature_norm(nn.functional.leaky_relu(self.conv2(x), self.slope), self.eps)
        return x


class Generator(nn.Module):
    def __init__(self, config: NetConfig, stage: int = 1):
        super().__init__()
        if not 1 <= stage <= config.n_stages:
            raise InvalidStage(f"stage {stage} outside 1..{config.n_stages}")
        self.config = config
        self.stage = stage
        self.input_map = WSLinear(config.n_z * config.n_classes, config.input_stage_features * config.base_length)
        # heads[i] and blocks[i-1] belong to stage i+1
        self.heads = nn.ModuleList([WSConv1d(config.input_stage_features, 1, 1)])
        self.blocks = nn.ModuleList()
        for s in range(2, stage + 1):
            self._append_stage(s)

    def _append_stage(self, s: int):
        cfg = self.config
        self.blocks.append(GeneratorBlock(cfg.features_at(s - 1), cfg.features_at(s), cfg))
        self.heads.append(WSConv1d(cfg.features_at(s), 1, 1))

    def grow(self) -> list[nn.Parameter]:
        """Add the next stage's block and head; returns the new parameters."""
        if self.stage >= self.config.n_stages:
            raise InvalidStage(f"cannot grow past stage {self.config.n_stages}")
        before = {id(p) for p in self.parameters()}
        self._append_stage(self.stage + 1)
        self.stage += 1
        return [p for p in self.parameters() if id(p) not in before]

    @property
    def output_length(self) -> int:
        return self.config.length_at(self.stage)

    def forward(self, z: torch.Tensor, labels: torch.Tensor, alpha: float = 1.0) -> torch.Tensor:
        """(B, n_z) latents + (B,) labels -> (B, 1, L_stage) traces."""
        cfg = self.config
        emb = embed_latent(z, labels, cfg.n_classes)
        h = self.input_map(emb).view(z.shape[0], cfg.input_stage_features, cfg.base_length)
        h = pixelwise_feature_norm(nn.functional.leaky_relu(h, cfg.leaky_slope), cfg.pixelnorm_epsilon)
        if self.stage == 1:
            return self.heads[0](h)
        for block in self.blocks[: self.stage - 2]:
            h = block(h)
        new = self.heads[self.stage - 1](self.blocks[self.stage - 2](h))
        if alpha >= 1.0:
            return new
        old = upsample_nn(self.heads[self.stage - 2](h))
        if alpha <= 0.0:
            return old
        return alpha * new + (1.0 - alpha) * old
