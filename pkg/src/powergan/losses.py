"""Critic and generator objectives.

The critic minimizes D_W + L_GP + L_C where D_W = E[D(fake)] - E[D(real)].
The gradient penalty is one-sided (only norms above 1 are penalized) and
carries the adaptive weight max(0, D_W), treated as a constant for
backpropagation so the weighting itself contributes no gradient. The
centering term epsilon * (E[D(real)] + E[D(fake)]) keeps scores near zero.

gradient_penalty needs second-order autograd (gradients of a gradient
norm); smoke_test_second_order() verifies the installed engine supports it.
"""

from dataclasses import dataclass

import numpy as np
import torch

from powergan.errors import EmptyBatch, InvalidPairing


@dataclass(frozen=True)
class LossConfig:
    lambda_gp: float = 10.0
    epsilon_center: float = 1e-3

    def __post_init__(self):
        if self.lambda_gp < 0:
            raise ValueError("lambda_gp must be non-negative")
        if not 0 <= self.epsilon_center <= 0.1:
            raise ValueError("epsilon_center must be small (<= 0.1)")

    def to_dict(self) -> dict:
        return {"lambda_gp": self.lambda_gp, "epsilon_center": self.epsilon_center}

    @classmethod
    def from_dict(cls, d: dict) -> "LossConfig":
        return cls(**d)


@dataclass(frozen=True)
class LossBreakdown:
    """One training step's critic/generator loss components (floats)."""

    d_w: float
    gp_term: float
    center_term: float
    total_critic: float
    total_generator: float


def wasserstein_estimate(scores_real: torch.Tensor, scores_fake: torch.Tensor) -> torch.Tensor:
    """D_W = mean(fake scores) - mean(real scores)."""
    if scores_real.numel() == 0 or scores_fake.numel() == 0:
        raise EmptyBatch("score batches must be non-empty")
    return scores_fake.mean() - scores_real.mean()


def center_loss(scores_real: torch.Tensor, scores_fake: torch.Tensor, epsilon: float) -> torch.Tensor:
    """epsilon * (mean(real scores) + mean(fake scores))."""
    return epsilon * (scores_real.mean() + scores_fake.mean())


def generator_loss(scores_fake: torch.Tensor) -> torch.Tensor:
    """-mean(fake scores)."""
    if scores_fake.numel() == 0:
        raise EmptyBatch("score batch must be non-empty")
    return -scores_fake.mean()


def gradient_penalty(
    critic,
    x_real: torch.Tensor,
    x_fake: torch.Tensor,
    labels: torch.Tensor,
    d_w: float,
    config: LossConfig,
    rng: np.random.Generator,
    alpha: float = 1.0,
) -> torch.Tensor:
    """Weighted one-sided penalty on critic gradients at mixed inputs.

    x_tilde_i = u_i * x_real_i + (1 - u_i) * x_fake_i with u_i ~ U[0, 1]
    per sample; the gradient is taken with respect to the signal only (label
    channels are constants of the pairing). Returns
    lambda * max(0, d_w) * mean_i(max(0, ||grad_i||_2 - 1)^2).
    """
    if x_real.shape != x_fake.shape or x_real.shape[0] != labels.shape[0]:
        raise InvalidPairing(
            f"real {tuple(x_real.shape)}, fake {tuple(x_fake.shape)}, labels {tuple(labels.shape)}"
        )
    weight = config.lambda_gp * max(0.0, float(d_w))
    if weight == 0.0:
        return x_real.new_zeros(())
    u = torch.from_numpy(rng.random(x_real.shape[0], dtype=np.float64)).to(x_real.dtype)
    u = u.view(-1, *([1] * (x_real.ndim - 1)))
    x_tilde = (u * x_real.detach() + (1.0 - u) * x_fake.detach()).requires_grad_(True)
    scores = critic(x_tilde, labels, alpha)
    (grads,) = torch.autograd.grad(scores.sum(), x_tilde, create_graph=True)
    norms = grads.flatten(1).norm(dim=1)
    return weight * torch.clamp(norms - 1.0, min=0.0).pow(2).mean()


def critic_loss(
    critic,
    x_real: torch.Tensor,
    x_fake: torch.Tensor,
    labels: torch.Tensor,
    scores_real: torch.Tensor,
    scores_fake: torch.Tensor,
    config: LossConfig,
    rng: np.random.Generator,
    alpha: float = 1.0,
) -> tuple[torch.Tensor, LossBreakdown]:
    """Total critic objective plus its logged breakdown."""
    d_w = wasserstein_estimate(scores_real, scores_fake)
    gp = gradient_penalty(critic, x_real, x_fake, labels, d_w.detach().item(), config, rng, alpha)
    center = center_loss(scores_real, scores_fake, config.epsilon_center)
    total = d_w + gp + center
    breakdown = LossBreakdown(
        d_w=d_w.detach().item(),
        gp_term=gp.detach().item(),
        center_term=center.detach().item(),
        total_critic=total.detach().item(),
        total_generator=-scores_fake.detach().mean().item(),
    )
    return total, breakdown


def smoke_test_second_order() -> None:
    """Fail fast if the autograd engine cannot differentiate gradient norms."""
    x = torch.randn(4, requires_grad=True)
    w = torch.randn(4, requires_grad=True)
    (g,) = torch.autograd.grad((x * w).sum().tanh(), x, create_graph=True)
    g.norm().backward()
    if w.grad is None or not torch.isfinite(w.grad).all():
        raise RuntimeError("second-order autograd unavailable; gradient penalty cannot train")
