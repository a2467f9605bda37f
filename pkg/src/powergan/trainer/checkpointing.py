"""Checkpoint directory format: two npz archives plus a JSON manifest.

params.npz holds every generator/critic parameter as a named float32 array;
training_state.npz holds the Adam moments and step counters keyed the same
way. manifest.json records stage, alpha, epoch, seed, and the config
snapshots needed to rebuild models and validate the dataset on resume. RNG
state is not stored: all training randomness is derived per (seed, stage,
epoch), so resuming re-derives the exact streams.
"""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from powergan.data_pipeline.windows import NormalizationManifest
from powergan.errors import IncompatibleCheckpoint, IoError
from powergan.losses import LossConfig
from powergan.nets import Critic, Generator, NetConfig
from powergan.trainer.schedule import TrainingSchedule

FORMAT_NAME = "powergan-checkpoint"
FORMAT_VERSION = 1
PARAMS_FILE = "params.npz"
STATE_FILE = "training_state.npz"
MANIFEST_FILE = "manifest.json"

_STATE_KEYS = ("exp_avg", "exp_avg_sq", "step")


def _stage_of_param(name: str) -> int:
    """Growth stage that introduced a parameter, from its qualified name."""
    parts = name.split(".")
    if parts[0] == "blocks":
        return int(parts[1]) + 2
    if parts[0] == "heads":
        return int(parts[1]) + 1
    return 1  # input_map / final


def stage_param_groups(model) -> list[list[torch.nn.Parameter]]:
    """Parameters grouped by introduction stage, mirroring grow() order."""
    groups: dict[int, list] = {}
    for name, p in model.named_parameters():
        groups.setdefault(_stage_of_param(name), []).append(p)
    return [groups[s] for s in sorted(groups)]


def build_optimizer(model, schedule: TrainingSchedule) -> torch.optim.Adam:
    """Adam with one param group per existing stage (so grow() appends)."""
    return torch.optim.Adam(
        [{"params": g} for g in stage_param_groups(model)],
        lr=schedule.lr,
        betas=(schedule.beta1, schedule.beta2),
    )


def _optimizer_arrays(prefix: str, model, opt) -> dict[str, np.ndarray]:
    out = {}
    for name, p in model.named_parameters():
        state = opt.state.get(p)
        if not state:
            continue
        for key in _STATE_KEYS:
            out[f"{prefix}/{name}/{key}"] = state[key].detach().cpu().numpy().astype(np.float32)
    return out


def _restore_optimizer(prefix: str, model, opt, arrays) -> None:
    for name, p in model.named_parameters():
        step_key = f"{prefix}/{name}/step"
        if step_key not in arrays:
            continue
        opt.state[p] = {
            "step": torch.from_numpy(np.asarray(arrays[step_key])).to(torch.float32),
            "exp_avg": torch.from_numpy(arrays[f"{prefix}/{name}/exp_avg"]).clone(),
            "exp_avg_sq": torch.from_numpy(arrays[f"{prefix}/{name}/exp_avg_sq"]).clone(),
        }


@dataclass
class Checkpoint:
    """A loaded checkpoint: rebuilt models, optimizers, and run position."""

    generator: Generator
    critic: Critic
    opt_g: torch.optim.Adam
    opt_d: torch.optim.Adam
    stage: int
    epoch: int
    alpha: float
    seed: int
    schedule: TrainingSchedule
    net_config: NetConfig
    loss_config: LossConfig
    normalization: NormalizationManifest | None
    path: Path


def save_checkpoint(
    directory,
    generator: Generator,
    critic: Critic,
    opt_g,
    opt_d,
    stage: int,
    epoch: int,
    alpha: float,
    seed: int,
    schedule: TrainingSchedule,
    loss_config: LossConfig,
    normalization: NormalizationManifest | None = None,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    params = {}
    for prefix, model in (("generator", generator), ("critic", critic)):
        for name, p in model.named_parameters():
            params[f"{prefix}/{name}"] = p.detach().cpu().numpy().astype(np.float32)
    np.savez(directory / PARAMS_FILE, **params)

    state = {}
    state.update(_optimizer_arrays("opt_g", generator, opt_g))
    state.update(_optimizer_arrays("opt_d", critic, opt_d))
    np.savez(directory / STATE_FILE, **state)

    manifest = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "stage": int(stage),
        "alpha": float(alpha),
        "epoch": int(epoch),
        "seed": int(seed),
        "params_file": PARAMS_FILE,
        "optimizer_state_file": STATE_FILE,
        "schedule": schedule.to_dict(),
        "net_config": generator.config.to_dict(),
        "loss_config": loss_config.to_dict(),
        "normalization": normalization.to_dict() if normalization else None,
    }
    with open(directory / MANIFEST_FILE, "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return directory


def load_checkpoint(directory) -> Checkpoint:
    directory = Path(directory)
    try:
        with open(directory / MANIFEST_FILE) as f:
            manifest = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise IoError(f"cannot read checkpoint manifest in {directory}: {e}") from e
    if manifest.get("format") != FORMAT_NAME:
        raise IncompatibleCheckpoint(f"{directory} is not a {FORMAT_NAME} directory")
    if manifest.get("version") != FORMAT_VERSION:
        raise IncompatibleCheckpoint(f"unsupported checkpoint version {manifest.get('version')}")

    net_config = NetConfig.from_dict(manifest["net_config"])
    schedule = TrainingSchedule.from_dict(manifest["schedule"])
    loss_config = LossConfig.from_dict(manifest["loss_config"])
    stage = manifest["stage"]

    generator = Generator(net_config, stage=stage)
    critic = Critic(net_config, stage=stage)
    try:
        with np.load(directory / manifest["params_file"]) as arrays:
            for prefix, model in (("generator", generator), ("critic", critic)):
                tensors = {}
                for name, _ in model.named_parameters():
                    key = f"{prefix}/{name}"
                    if key not in arrays:
                        raise IncompatibleCheckpoint(f"missing parameter {key}")
                    tensors[name] = torch.from_numpy(arrays[key].copy())
                model.load_state_dict(tensors)
    except OSError as e:
        raise IoError(f"cannot read checkpoint parameters: {e}") from e

    opt_g = build_optimizer(generator, schedule)
    opt_d = build_optimizer(critic, schedule)
    try:
        with np.load(directory / manifest["optimizer_state_file"]) as arrays:
            arrays = dict(arrays)
    except OSError as e:
        raise IoError(f"cannot read optimizer state: {e}") from e
    _restore_optimizer("opt_g", generator, opt_g, arrays)
    _restore_optimizer("opt_d", critic, opt_d, arrays)

    normalization = (
        NormalizationManifest.from_dict(manifest["normalization"]) if manifest.get("normalization") else None
    )
    return Checkpoint(
        generator=generator,
        critic=critic,
        opt_g=opt_g,
        opt_d=opt_d,
        stage=stage,
        epoch=manifest["epoch"],
        alpha=manifest["alpha"],
        seed=manifest["seed"],
        schedule=schedule,
        net_config=net_config,
        loss_config=loss_config,
        normalization=normalization,
        path=directory,
    )
