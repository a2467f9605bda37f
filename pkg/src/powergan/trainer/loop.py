"""The progressive training procedure.

For each stage the models grow by one block, then train epochs_per_stage
epochs with the fade coefficient ramping linearly over the first
fade_epochs. Every epoch re-derives its own named random substreams from
(seed, stage, epoch), so an interrupted run resumed from a checkpoint
replays the identical batch order, latent draws, and interpolation mixes.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from powergan.data_pipeline.batches import epoch_batches, stage_factor
from powergan.data_pipeline.windows import NormalizationManifest
from powergan.errors import EmptyDataset, IncompatibleCheckpoint, NonFiniteLoss
from powergan.losses import LossConfig, critic_loss, generator_loss
from powergan.nets import Critic, Generator, NetConfig
from powergan.seeds import substream, substream_int
from powergan.trainer.checkpointing import Checkpoint, build_optimizer, load_checkpoint, save_checkpoint
from powergan.trainer.schedule import TrainingSchedule

LOG_FIELDS = ("epoch", "stage", "alpha", "D_W", "gp", "center", "L_D", "L_G")


@dataclass
class TrainingData:
    """Normalized windows ready for training, labels encoded as class ids."""

    samples: np.ndarray
    label_ids: np.ndarray
    label_names: tuple[str, ...]

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float32)
        self.label_ids = np.asarray(self.label_ids, dtype=np.int64)
        if self.samples.ndim != 2 or self.samples.shape[0] != self.label_ids.shape[0]:
            raise ValueError("samples must be (count, length) aligned with label_ids")
        if self.samples.shape[0] == 0:
            raise EmptyDataset("no training windows")

    @property
    def window_length(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def from_stacks(cls, stacks: dict[str, np.ndarray]) -> "TrainingData":
        names = tuple(sorted(stacks))
        samples = np.concatenate([stacks[n] for n in names], axis=0)
        ids = np.concatenate([np.full(stacks[n].shape[0], i, dtype=np.int64) for i, n in enumerate(names)])
        return cls(samples=samples, label_ids=ids, label_names=names)


def _check_compatible(data: TrainingData, net_config: NetConfig, schedule: TrainingSchedule):
    expected = net_config.base_length * 2 ** (schedule.n_stages - 1)
    if data.window_length != expected:
        raise IncompatibleCheckpoint(
            f"window length {data.window_length} != {expected} required by "
            f"{schedule.n_stages} stages of base length {net_config.base_length}"
        )
    if data.label_ids.max() >= net_config.n_classes:
        raise IncompatibleCheckpoint(
            f"dataset has label id {int(data.label_ids.max())} but net expects {net_config.n_classes} classes"
        )


class _LogWriter:
    def __init__(self, path: Path):
        self.rows: list[dict] = []
        self._file = open(path, "w", newline="")
        self._writer = csv.DictWriter(self._file, fieldnames=LOG_FIELDS)
        self._writer.writeheader()

    def add(self, row: dict):
        self.rows.append(row)
        self._writer.writerow(row)

    def close(self):
        self._file.flush()
        self._file.close()


def _train_from(
    data: TrainingData,
    schedule: TrainingSchedule,
    net_config: NetConfig,
    loss_config: LossConfig,
    out_dir: Path,
    normalization: NormalizationManifest | None,
    generator: Generator,
    critic: Critic,
    opt_g,
    opt_d,
    start_stage: int,
    start_epoch: int,
    stop_after_epochs: int | None,
) -> tuple[Path, list[dict]]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    log = _LogWriter(out_dir / "training_log.csv")
    seed = schedule.seed

    def save(tag_stage, tag_epoch, alpha, sub="") -> Path:
        name = sub or f"ckpt_stage{tag_stage}_ep{tag_epoch}"
        return save_checkpoint(
            out_dir / name, generator, critic, opt_g, opt_d,
            stage=tag_stage, epoch=tag_epoch, alpha=alpha, seed=seed,
            schedule=schedule, loss_config=loss_config, normalization=normalization,
        )

    epochs_done = 0
    last_path = None
    try:
        for stage in range(start_stage, schedule.n_stages + 1):
            if stage > generator.stage:
                torch.manual_seed(substream_int(seed, "init", stage))
                opt_g.add_param_group({"params": generator.grow()})
                opt_d.add_param_group({"params": critic.grow()})
            factor = stage_factor(stage, schedule.n_stages)
            first_epoch = start_epoch if stage == start_stage else 1
            for ep in range(first_epoch, schedule.epochs_per_stage + 1):
                alpha = schedule.alpha_at(ep)
                shift_rng = substream(seed, "shift", stage, ep)
                latent_rng = substream(seed, "latent", stage, ep)
                mix_rng = substream(seed, "mix", stage, ep)
                gen_this_epoch = not schedule.ratio_per_epoch or ep % schedule.critic_ratio == 0
                for it, (xb, yb) in enumerate(
                    epoch_batches(data.samples, data.label_ids, schedule.batch_size, factor, shift_rng)
                ):
                    x_real = torch.from_numpy(xb)
                    labels = torch.from_numpy(yb)
                    b = labels.shape[0]

                    z = torch.from_numpy(latent_rng.standard_normal((b, net_config.n_z)).astype(np.float32))
                    with torch.no_grad():
                        x_fake = generator(z, labels, alpha)
                    scores_real = critic(x_real, labels, alpha)
                    scores_fake = critic(x_fake, labels, alpha)
                    total_d, breakdown = critic_loss(
                        critic, x_real, x_fake, labels, scores_real, scores_fake,
                        loss_config, mix_rng, alpha,
                    )
                    if not torch.isfinite(total_d):
                        save(stage, ep, alpha, sub="diagnostic_nonfinite")
                        raise NonFiniteLoss(f"critic loss non-finite at stage {stage} epoch {ep}")
                    opt_d.zero_grad(set_to_none=True)
                    total_d.backward()
                    opt_d.step()

                    log_g = breakdown.total_generator
                    if gen_this_epoch and (schedule.ratio_per_epoch or it % schedule.critic_ratio == 0):
                        z2 = torch.from_numpy(latent_rng.standard_normal((b, net_config.n_z)).astype(np.float32))
                        # critic batches are single-class, but one generator
                        # update must push every class at once: stepping on
                        # one class at a time flip-flops the shared trunk
                        # between modes instead of splitting them by label
                        gen_labels = torch.from_numpy(latent_rng.choice(data.label_ids, size=b))
                        x_gen = generator(z2, gen_labels, alpha)
                        loss_g = generator_loss(critic(x_gen, gen_labels, alpha))
                        if not torch.isfinite(loss_g):
                            save(stage, ep, alpha, sub="diagnostic_nonfinite")
                            raise NonFiniteLoss(f"generator loss non-finite at stage {stage} epoch {ep}")
                        opt_g.zero_grad(set_to_none=True)
                        loss_g.backward()
                        opt_g.step()
                        log_g = loss_g.detach().item()

                    log.add({
                        "epoch": ep, "stage": stage, "alpha": alpha,
                        "D_W": breakdown.d_w, "gp": breakdown.gp_term,
                        "center": breakdown.center_term, "L_D": breakdown.total_critic,
                        "L_G": log_g,
                    })

                epochs_done += 1
                at_boundary = ep == schedule.epochs_per_stage
                stopping = stop_after_epochs is not None and epochs_done >= stop_after_epochs
                if ep % schedule.checkpoint_every == 0 or at_boundary or stopping:
                    last_path = save(stage, ep, alpha)
                if stopping:
                    return last_path, log.rows
    finally:
        log.close()
    return last_path, log.rows


def train(
    data: TrainingData,
    schedule: TrainingSchedule,
    net_config: NetConfig,
    loss_config: LossConfig,
    out_dir,
    normalization: NormalizationManifest | None = None,
    stop_after_epochs: int | None = None,
) -> tuple[Path, list[dict]]:
    """Run the full procedure from scratch; returns (last checkpoint, log rows)."""
    _check_compatible(data, net_config, schedule)
    torch.manual_seed(substream_int(schedule.seed, "init", 1))
    generator = Generator(net_config, stage=1)
    critic = Critic(net_config, stage=1)
    opt_g = build_optimizer(generator, schedule)
    opt_d = build_optimizer(critic, schedule)
    return _train_from(
        data, schedule, net_config, loss_config, Path(out_dir), normalization,
        generator, critic, opt_g, opt_d,
        start_stage=1, start_epoch=1, stop_after_epochs=stop_after_epochs,
    )


def resume(
    checkpoint_dir,
    data: TrainingData,
    out_dir,
    stop_after_epochs: int | None = None,
) -> tuple[Path, list[dict]]:
    """Continue a run from a saved checkpoint to completion."""
    ckpt: Checkpoint = load_checkpoint(checkpoint_dir)
    _check_compatible(data, ckpt.net_config, ckpt.schedule)
    if ckpt.normalization is not None and ckpt.normalization.window_length != data.window_length:
        raise IncompatibleCheckpoint("checkpoint normalization disagrees with dataset window length")
    start_stage, start_epoch = ckpt.stage, ckpt.epoch + 1
    if start_epoch > ckpt.schedule.epochs_per_stage:
        start_stage, start_epoch = start_stage + 1, 1
        if start_stage > ckpt.schedule.n_stages:
            raise IncompatibleCheckpoint("checkpoint is already at the end of the schedule")
    return _train_from(
        data, ckpt.schedule, ckpt.net_config, ckpt.loss_config, Path(out_dir), ckpt.normalization,
        ckpt.generator, ckpt.critic, ckpt.opt_g, ckpt.opt_d,
        start_stage=start_stage, start_epoch=start_epoch, stop_after_epochs=stop_after_epochs,
    )
