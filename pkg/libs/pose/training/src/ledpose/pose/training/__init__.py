"""ledpose training - self-supervised LED-state training, fine-tuning and the supervised upperbound."""

from ledpose.pose.training.augment import augment, color_jitter, noise_gain
from ledpose.pose.training.config import AugmentConfig, TrainConfig
from ledpose.pose.training.data import LedFrameDataset, label_permutation, make_loader
from ledpose.pose.training.loop import (
    BEST_NAME,
    LAST_NAME,
    LossFn,
    TrainResult,
    check_labels,
    cosine_scheduler,
    evaluate_loss,
    resume_into,
    run_epochs,
    self_supervised_loss,
    train,
)
from ledpose.pose.training.schedule import HISTORY_NAME, EpochRecord, TrainHistory, early_stop_select, lr_at
from ledpose.pose.training.upperbound import (
    SupervisedFrameDataset,
    TargetGeometry,
    pose_target,
    supervised_loss,
    supervised_loss_terms,
    target_cell,
    target_scale,
    train_supervised_upperbound,
)

__all__ = [
    # config
    "AugmentConfig",
    "TrainConfig",
    # schedule
    "HISTORY_NAME",
    "EpochRecord",
    "TrainHistory",
    "early_stop_select",
    "lr_at",
    # data
    "LedFrameDataset",
    "augment",
    "color_jitter",
    "label_permutation",
    "make_loader",
    "noise_gain",
    # loop
    "BEST_NAME",
    "LAST_NAME",
    "LossFn",
    "TrainResult",
    "check_labels",
    "cosine_scheduler",
    "evaluate_loss",
    "resume_into",
    "run_epochs",
    "self_supervised_loss",
    "train",
    # upperbound
    "SupervisedFrameDataset",
    "TargetGeometry",
    "pose_target",
    "supervised_loss",
    "supervised_loss_terms",
    "target_cell",
    "target_scale",
    "train_supervised_upperbound",
]
