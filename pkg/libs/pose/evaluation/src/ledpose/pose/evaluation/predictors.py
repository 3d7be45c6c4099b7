"""Predictors under evaluation: the trained network and the mean-pose baseline."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from numpy.typing import NDArray
from torch import Tensor

from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    ManifestAccessor,
    Pose2D,
    circular_mean,
    project_pose,
)
from ledpose.pose.evaluation.truth import scene_geometry
from ledpose.pose.inference import Calibration, PoseEstimate, estimate_poses
from ledpose.pose.model import LedPoseNet

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class FramePrediction:
    u: float
    v: float
    psi: float
    d: float
    pose: Pose2D
    led_probs: NDArray[np.float64]


class Predictor(Protocol):
    def predict(self, images: Tensor) -> list[FramePrediction]: ...


def prediction_from_estimate(estimate: PoseEstimate, intr: CameraIntrinsics) -> FramePrediction:
    pose = estimate.pose(intr)
    if pose is None or estimate.d is None:
        raise DatasetError("estimate carries no metric distance; evaluate with a calibration")
    return FramePrediction(
        u=estimate.u,
        v=estimate.v,
        psi=estimate.psi,
        d=estimate.d,
        pose=pose,
        led_probs=np.asarray(estimate.led_probs, dtype=np.float64),
    )


@dataclass(slots=True)
class NetworkPredictor:
    model: LedPoseNet
    cal: Calibration
    intr: CameraIntrinsics

    def predict(self, images: Tensor) -> list[FramePrediction]:
        estimates = estimate_poses(self.model, images, self.cal, self.intr)
        return [prediction_from_estimate(e, self.intr) for e in estimates]


@dataclass(slots=True)
class MeanPredictor:
    """Always answers with the same pose, and LED probabilities of one half."""

    pose: Pose2D
    u: float
    v: float
    led_count: int
    led_probs: NDArray[np.float64] = field(init=False)

    def __post_init__(self) -> None:
        self.led_probs = np.full(self.led_count, 0.5)

    def predict(self, images: Tensor) -> list[FramePrediction]:
        return [
            FramePrediction(self.u, self.v, self.pose.psi, self.pose.distance, self.pose, self.led_probs.copy())
            for _ in range(int(images.shape[0]))
        ]


def mean_predictor(train_manifest: DatasetManifest, intr: CameraIntrinsics) -> MeanPredictor:
    """
    Baseline answering the mean visible training pose: arithmetic mean of x and y,
    circular mean of the bearing, projected with ``intr`` for the pixel location.

    Raises:
        DatasetError: If the manifest has no visible frames
    """
    accessor = ManifestAccessor(train_manifest, allow_poses=True)
    poses = [p for i in range(len(accessor)) if (p := accessor.pose(i)) is not None]
    if not poses:
        raise DatasetError(f"manifest at {train_manifest.root} has no visible-robot frames")
    _, drop = scene_geometry(train_manifest)
    mean = Pose2D(
        x=float(np.mean([p.x for p in poses])),
        y=float(np.mean([p.y for p in poses])),
        psi=circular_mean([p.psi for p in poses]),
    )
    u, v = project_pose(intr, mean, drop)
    logger.info("Mean predictor over %d poses: x=%.3f y=%.3f psi=%.3f", len(poses), mean.x, mean.y, mean.psi)
    return MeanPredictor(pose=mean, u=u, v=v, led_count=train_manifest.led_count)


__all__ = [
    "FramePrediction",
    "MeanPredictor",
    "NetworkPredictor",
    "Predictor",
    "mean_predictor",
    "prediction_from_estimate",
]
