"""Architecture hyperparameters and progressive-growth stage bookkeeping."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class NetConfig:
    """Shared generator/critic sizing.

    The input stage carries n_classes times the base feature count to absorb
    the label-conditioned latent; every later block uses base_features.
    """

    n_z: int = 100
    n_classes: int = 5
    n_stages: int = 6
    base_length: int = 70
    base_features: int = 64
    input_stage_features: int | None = None
    kernel_size: int = 9
    leaky_slope: float = 0.2
    pixelnorm_epsilon: float = 1e-8
    mbstd_epsilon: float = 1e-8

    def __post_init__(self):
        if self.input_stage_features is None:
            object.__setattr__(self, "input_stage_features", self.n_classes * self.base_features)
        for name in ("n_z", "n_classes", "n_stages", "base_length", "base_features", "input_stage_features"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.kernel_size < 1 or self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd and positive")

    def features_at(self, stage: int) -> int:
        if not 1 <= stage <= self.n_stages:
            raise ValueError(f"stage {stage} outside 1..{self.n_stages}")
        return self.input_stage_features if stage == 1 else self.base_features

    def length_at(self, stage: int) -> int:
        if not 1 <= stage <= self.n_stages:
            raise ValueError(f"stage {stage} outside 1..{self.n_stages}")
        return self.base_length * 2 ** (stage - 1)

    def to_dict(self) -> dict:
        return {
            "n_z": self.n_z,
            "n_classes": self.n_classes,
            "n_stages": self.n_stages,
            "base_length": self.base_length,
            "base_features": self.base_features,
            "input_stage_features": self.input_stage_features,
            "kernel_size": self.kernel_size,
            "leaky_slope": self.leaky_slope,
            "pixelnorm_epsilon": self.pixelnorm_epsilon,
            "mbstd_epsilon": self.mbstd_epsilon,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NetConfig":
        return cls(**d)


@dataclass(frozen=True)
class StageState:
    """Where a progressive run currently stands: block count and fade mix."""

    n: int = 1
    alpha: float = 1.0
    base_length: int = field(default=70, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("stage index must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def signal_length(self) -> int:
        return self.base_length * 2 ** (self.n - 1)
