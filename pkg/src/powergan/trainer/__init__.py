"""Progressive training loop, schedule, and checkpoint round-trip."""

from powergan.trainer.checkpointing import (
    Checkpoint,
    build_optimizer,
    load_checkpoint,
    save_checkpoint,
    stage_param_groups,
)
from powergan.trainer.loop import LOG_FIELDS, TrainingData, resume, train
from powergan.trainer.schedule import TrainingSchedule

__all__ = [
    "LOG_FIELDS",
    "Checkpoint",
    "TrainingData",
    "TrainingSchedule",
    "build_optimizer",
    "load_checkpoint",
    "resume",
    "save_checkpoint",
    "stage_param_groups",
    "train",
]
