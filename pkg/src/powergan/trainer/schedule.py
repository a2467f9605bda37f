"""Training schedule: stage/epoch structure de-facto fixed by the procedure.

alpha ramps linearly over the first fade_epochs of each stage and stays at
1 afterwards. The critic trains every iteration; the generator every
critic_ratio-th iteration (or every critic_ratio-th epoch when
ratio_per_epoch is set, for the coarser reading of the procedure).
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class TrainingSchedule:
    n_stages: int = 6
    epochs_per_stage: int = 2000
    fade_epochs: int = 1000
    critic_ratio: int = 1
    ratio_per_epoch: bool = False
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.0
    beta2: float = 0.99
    checkpoint_every: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.fade_epochs > self.epochs_per_stage:
            raise ValueError("fade_epochs must not exceed epochs_per_stage")
        if self.fade_epochs < 1 or self.epochs_per_stage < 1:
            raise ValueError("epoch counts must be positive")
        if self.critic_ratio < 1:
            raise ValueError("critic_ratio must be >= 1")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2 (minibatch std needs company)")
        if self.n_stages < 1:
            raise ValueError("n_stages must be positive")
        if self.checkpoint_every < 1:
            raise ValueError("checkpoint_every must be positive")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")

    def alpha_at(self, epoch: int) -> float:
        """Fade coefficient for 1-based epoch index within a stage."""
        return min(1.0, epoch / self.fade_epochs)

    def to_dict(self) -> dict:
        return {
            "n_stages": self.n_stages,
            "epochs_per_stage": self.epochs_per_stage,
            "fade_epochs": self.fade_epochs,
            "critic_ratio": self.critic_ratio,
            "ratio_per_epoch": self.ratio_per_epoch,
            "batch_size": self.batch_size,
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "checkpoint_every": self.checkpoint_every,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TrainingSchedule":
        return cls(**d)
