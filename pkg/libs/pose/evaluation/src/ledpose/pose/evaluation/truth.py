"""Ground truth for evaluation frames: projected centers, poses, LED states and LED visibility."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    LedConfiguration,
    ManifestAccessor,
    Pose2D,
    project_pose,
)
from ledpose.pose.synth import SceneConfig, visible_leds

Subset = Literal["leds_off"]


@dataclass(slots=True)
class FrameTruth:
    index: int
    u: float
    v: float
    pose: Pose2D
    leds: NDArray[np.float32]
    led_visible: NDArray[np.bool_]

    @property
    def leds_off(self) -> bool:
        """Every LED facing the camera is off."""
        return not bool(np.any(self.leds[self.led_visible] > 0.5))


def scene_geometry(manifest: DatasetManifest) -> tuple[LedConfiguration, float]:
    """LED layout and camera drop recorded with the dataset; defaults when the manifest has no scene."""
    if manifest.scene:
        scene = SceneConfig.model_validate(manifest.scene)
        return scene.led_config, scene.camera_drop
    return LedConfiguration(count=manifest.led_count), 0.0


def frame_truth(
    index: int,
    pose: Pose2D,
    leds: NDArray[np.float32],
    intr: CameraIntrinsics,
    led_config: LedConfiguration,
    camera_drop: float = 0.0,
) -> FrameTruth:
    u, v = project_pose(intr, pose, camera_drop)
    return FrameTruth(index, u, v, pose, leds, visible_leds(pose.psi, led_config))


def frame_truths(manifest: DatasetManifest, intr: CameraIntrinsics, subset: Subset | None = None) -> list[FrameTruth]:
    """
    Ground truth of every visible-robot frame, optionally restricted to a subset.

    Raises:
        DatasetError: If no frame qualifies
    """
    accessor = ManifestAccessor(manifest, allow_poses=True)
    led_config, drop = scene_geometry(manifest)
    truths: list[FrameTruth] = []
    for i in range(len(accessor)):
        pose = accessor.pose(i)
        if pose is None:
            continue
        truth = frame_truth(i, pose, accessor.leds(i), intr, led_config, drop)
        if subset == "leds_off" and not truth.leds_off:
            continue
        truths.append(truth)
    if not truths:
        what = "visible-robot frames" if subset is None else f"visible-robot frames in subset {subset!r}"
        raise DatasetError(f"manifest at {manifest.root} has no {what}")
    return truths


__all__ = ["FrameTruth", "Subset", "frame_truth", "frame_truths", "scene_geometry"]
