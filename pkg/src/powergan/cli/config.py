"""Run configuration: defaults, INI config file, environment, CLI flags.

Precedence, lowest to highest: built-in defaults, POWERGAN_SEED (seed
only), config file sections, command-line flags. The effective merged
config is echoed as INI text into every output directory so any run can be
reproduced from that file alone.
"""

import configparser
import os
from dataclasses import dataclass, field

from powergan.data_pipeline.windows import FilterParams
from powergan.errors import IoError
from powergan.losses import LossConfig
from powergan.nets import NetConfig
from powergan.trainer import TrainingSchedule

ENV_SEED = "POWERGAN_SEED"

# section -> key -> default; types are inferred from these values
_DEFAULTS: dict[str, dict] = {
    "run": {"seed": 0},
    "data": {"window_length": 2240, "sample_period_s": 8.0, "max_fill_s": 120.0},
    "filter": {"activation_edge_watts": 50.0, "energy_threshold_wh": 33.33, "sparsity_min": 0.5},
    "net": {
        "n_z": 100,
        "n_classes": 5,
        "n_stages": 6,
        "base_length": 70,
        "base_features": 64,
        "kernel_size": 9,
        "leaky_slope": 0.2,
        "pixelnorm_epsilon": 1e-8,
        "mbstd_epsilon": 1e-8,
    },
    "schedule": {
        "n_stages": 6,
        "epochs_per_stage": 2000,
        "fade_epochs": 1000,
        "critic_ratio": 1,
        "ratio_per_epoch": False,
        "batch_size": 32,
        "lr": 1e-3,
        "beta1": 0.0,
        "beta2": 0.99,
        "checkpoint_every": 100,
    },
    "loss": {"lambda_gp": 10.0, "epsilon_center": 1e-3},
    "classifier": {"epochs": 40, "base_channels": 16, "embedding_dim": 128, "batch_size": 32, "lr": 1e-3},
    "evaluate": {"iterations": 10, "projections": 1000},
}


def _coerce(raw: str, default):
    if isinstance(default, bool):
        lowered = raw.strip().lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    return type(default)(raw)


@dataclass
class RunConfig:
    """Fully merged settings for one invocation."""

    values: dict[str, dict] = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict:
        return self.values[section]

    @property
    def seed(self) -> int:
        return self.values["run"]["seed"]

    def filter_params(self) -> FilterParams:
        return FilterParams(**self.values["filter"])

    def net_config(self) -> NetConfig:
        return NetConfig(**self.values["net"])

    def schedule(self) -> TrainingSchedule:
        return TrainingSchedule(seed=self.seed, **self.values["schedule"])

    def loss_config(self) -> LossConfig:
        return LossConfig(**self.values["loss"])

    def to_ini(self) -> str:
        parser = configparser.ConfigParser()
        for section in sorted(self.values):
            parser[section] = {k: repr(v) if isinstance(v, bool) else str(v) for k, v in sorted(self.values[section].items())}
        lines = []
        for section in parser.sections():
            lines.append(f"[{section}]")
            lines.extend(f"{k} = {v}" for k, v in parser[section].items())
            lines.append("")
        return "\n".join(lines)


def load_run_config(
    config_path=None,
    overrides: dict[tuple[str, str], object] | None = None,
    env=os.environ,
) -> RunConfig:
    """Merge defaults, environment seed, INI file, and flag overrides."""
    values = {section: dict(keys) for section, keys in _DEFAULTS.items()}

    env_seed = env.get(ENV_SEED)
    if env_seed is not None:
        try:
            values["run"]["seed"] = int(env_seed)
        except ValueError as e:
            raise IoError(f"{ENV_SEED} must be an integer, got {env_seed!r}") from e

    if config_path is not None:
        parser = configparser.ConfigParser()
        try:
            with open(config_path) as f:
                parser.read_file(f)
        except (OSError, configparser.Error) as e:
            raise IoError(f"cannot read config {config_path}: {e}") from e
        for section in parser.sections():
            if section not in values:
                raise IoError(f"unknown config section [{section}]")
            for key, raw in parser[section].items():
                if key not in values[section]:
                    raise IoError(f"unknown config key {key!r} in section [{section}]")
                try:
                    values[section][key] = _coerce(raw, _DEFAULTS[section][key])
                except ValueError as e:
                    raise IoError(f"bad value for [{section}] {key}: {e}") from e

    for (section, key), value in (overrides or {}).items():
        if value is None:
            continue
        default = _DEFAULTS[section][key]
        values[section][key] = value if not isinstance(value, str) else _coerce(value, default)

    return RunConfig(values=values)


def write_effective_config(config: RunConfig, out_dir) -> None:
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "effective_config.ini").write_text(config.to_ini())
