"""Fully supervised baseline: the same network trained against ground-truth poses.

Loss per visible frame: cross-entropy of the joint presence softmax against the
(scale, cell) holding the robot, squared error of the bearing pair at that cell,
and LED cross-entropy at that cell.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from torch import Tensor

from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    InvalidInputError,
    ManifestAccessor,
    Pose2D,
    derive_seed,
    project_pose,
)
from ledpose.pose.model import LedPoseNet, ModelConfig, MultiScaleStack, bce_map, multi_scale_forward
from ledpose.pose.training.config import AugmentConfig, TrainConfig
from ledpose.pose.training.data import LedFrameDataset, make_loader
from ledpose.pose.training.loop import TrainResult, check_labels, resume_into, run_epochs

logger = logging.getLogger(__name__)


@dataclass(slots=True, frozen=True)
class TargetGeometry:
    """How ground-truth poses map to output cells and scales.

    ``d_c`` is the distance at which the robot spans one receptive field at scale 1.
    """

    intrinsics: CameraIntrinsics
    d_c: float
    camera_drop: float = 0.0


def target_cell(u: float, v: float, grid: tuple[int, int], image_size: tuple[int, int]) -> tuple[int, int]:
    """(row, col) of the cell whose area contains pixel (u, v), clamped to the grid."""
    h, w = grid
    width, height = image_size
    col = int(math.floor(u / (width / w)))
    row = int(math.floor(v / (height / h)))
    return min(max(row, 0), h - 1), min(max(col, 0), w - 1)


def target_scale(distance: float, d_c: float, scale_factors: tuple[float, ...]) -> int:
    """Index of the scale s whose d_c * s is closest to ``distance`` on a log axis."""
    if distance <= 0 or d_c <= 0:
        raise InvalidInputError("distances must be positive")
    errors = [abs(math.log(distance / (d_c * s))) for s in scale_factors]
    return int(np.argmin(errors))


def pose_target(pose: Pose2D, geometry: TargetGeometry, cfg: ModelConfig) -> list[float]:
    """[scale index, row, col, cos psi, sin psi] for one robot."""
    intr = geometry.intrinsics
    if (intr.width, intr.height) != (cfg.input_width, cfg.input_height):
        raise InvalidInputError("intrinsics do not match the model input size")
    u, v = project_pose(intr, pose, geometry.camera_drop)
    w, h = cfg.grid_shape(1.0)
    row, col = target_cell(u, v, (h, w), (cfg.input_width, cfg.input_height))
    scale = target_scale(pose.distance, geometry.d_c, cfg.scale_factors)
    return [float(scale), float(row), float(col), math.cos(pose.psi), math.sin(pose.psi)]


class SupervisedFrameDataset(LedFrameDataset):
    """Visible frames only, each with its (scale, cell, bearing) target."""

    def __init__(
        self,
        manifest: DatasetManifest,
        geometry: TargetGeometry,
        cfg: ModelConfig,
        *,
        augment_cfg: AugmentConfig | None = None,
        seed: int = 0,
    ):
        full = ManifestAccessor(manifest, allow_poses=True)
        visible = [i for i in range(len(full)) if full.visible(i)]
        if not visible:
            raise DatasetError("no frames with ground-truth poses")
        subset = DatasetManifest(manifest.root, [manifest.records[i] for i in visible], manifest.scene)
        accessor = ManifestAccessor(subset, allow_poses=True)
        super().__init__(accessor, augment_cfg=augment_cfg, seed=seed)
        targets: list[list[float]] = []
        for i in range(len(accessor)):
            pose = accessor.pose(i)
            assert pose is not None
            targets.append(pose_target(pose, geometry, cfg))
        self.targets = torch.tensor(targets, dtype=torch.float32)

    def __getitem__(self, index: int) -> tuple[Tensor, Tensor, Tensor]:  # type: ignore[override]
        image, leds = super().__getitem__(index)
        return image, leds, self.targets[index]


def supervised_loss_terms(stack: MultiScaleStack, labels: Tensor, targets: Tensor) -> dict[str, Tensor]:
    """Per-term batch means; ``targets`` is (B, 5) as built by :func:`pose_target`."""
    b = stack.batch_size
    s_count = len(stack.scale_factors)
    h, w = stack.grid
    scale = targets[:, 0].long().clamp(0, s_count - 1)
    row = targets[:, 1].long()
    col = targets[:, 2].long()
    batch = torch.arange(b, device=targets.device)

    log_presence = F.log_softmax(stack.presence_logits.reshape(b, -1), dim=1)
    flat = (scale * h + row) * w + col
    presence_ce = -log_presence[batch, flat].mean()

    pair = stack.bearing[batch, scale, :, row, col]  # (B, 2)
    bearing_mse = ((pair - targets[:, 3:5].to(pair.dtype)) ** 2).sum(dim=1).mean()

    probs = stack.led_probs[batch, scale, :, row, col]  # (B, K)
    led_bce = bce_map(probs, labels.to(probs.dtype)).mean()
    return {"presence": presence_ce, "bearing": bearing_mse, "led": led_bce}


def supervised_loss(model: LedPoseNet, batch: tuple[Tensor, ...], device: torch.device) -> Tensor:
    images, labels, targets = (t.to(device) for t in batch)
    terms = supervised_loss_terms(multi_scale_forward(model, images), labels, targets)
    return terms["presence"] + terms["bearing"] + terms["led"]


def train_supervised_upperbound(
    model: LedPoseNet,
    train_manifest: DatasetManifest,
    val_manifest: DatasetManifest,
    cfg: TrainConfig,
    geometry: TargetGeometry,
    out_dir: Path | None = None,
) -> TrainResult:
    """
    Train ``model`` with pose supervision on the visible frames of both manifests.

    Raises:
        DatasetError: If a manifest has no visible frames or mismatched LED labels
    """
    if cfg.resume_from is not None:
        resume_into(model, cfg.resume_from)
    if cfg.max_samples is not None:
        train_manifest = train_manifest.head(cfg.max_samples)
    check_labels(train_manifest, model)
    check_labels(val_manifest, model)
    train_set = SupervisedFrameDataset(
        train_manifest, geometry, model.cfg, augment_cfg=cfg.augment, seed=derive_seed(cfg.seed, "augment")
    )
    val_set = SupervisedFrameDataset(val_manifest, geometry, model.cfg)
    logger.info("Supervised upperbound on %d visible frames, validating on %d", len(train_set), len(val_set))
    return run_epochs(
        model,
        make_loader(
            train_set,
            batch_size=cfg.batch_size,
            shuffle=True,
            seed=derive_seed(cfg.seed, "loader"),
            num_workers=cfg.num_workers,
        ),
        make_loader(val_set, batch_size=cfg.batch_size, shuffle=False, num_workers=cfg.num_workers),
        supervised_loss,
        cfg,
        out_dir,
        meta={"mode": "supervised", "seed": cfg.seed, "d_c": geometry.d_c},
    )


__all__ = [
    "SupervisedFrameDataset",
    "TargetGeometry",
    "pose_target",
    "supervised_loss",
    "supervised_loss_terms",
    "target_cell",
    "target_scale",
    "train_supervised_upperbound",
]
