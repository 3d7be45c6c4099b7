"""Multi-robot evaluation: extracted robots matched to ground truth by optimal assignment."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    ManifestAccessor,
    circular_error,
    load_image,
    pose_accuracy_gamma,
)
from ledpose.pose.evaluation.metrics import GAMMA_ANGLE, GAMMA_POSITION
from ledpose.pose.evaluation.predictors import prediction_from_estimate
from ledpose.pose.evaluation.report import MultiRobotReport
from ledpose.pose.evaluation.truth import FrameTruth, frame_truth, scene_geometry
from ledpose.pose.inference import PEAK_THRESHOLD, Calibration, estimate_multi_pose
from ledpose.pose.model import LedPoseNet

logger = logging.getLogger(__name__)


def match_by_pixel(truths: list[FrameTruth], predicted_uv: list[tuple[float, float]]) -> list[tuple[int, int]]:
    """(truth index, prediction index) pairs minimizing the summed pixel distance."""
    if not truths or not predicted_uv:
        return []
    cost = np.array([[math.hypot(t.u - u, t.v - v) for u, v in predicted_uv] for t in truths])
    rows, cols = linear_sum_assignment(cost)
    return list(zip(rows.tolist(), cols.tolist(), strict=True))


def evaluate_multi_robot(
    model: LedPoseNet,
    manifest: DatasetManifest,
    cal: Calibration,
    intr: CameraIntrinsics,
    *,
    max_robots: int = 4,
    nms_radius: float | None = None,
    threshold: float = PEAK_THRESHOLD,
) -> MultiRobotReport:
    """
    Extract robots from every frame and compare them with the robots actually rendered.

    A frame counts as correct when the number of extracted robots equals the number
    present. Errors are taken over matched pairs only.

    Raises:
        DatasetError: If the manifest is empty
    """
    if len(manifest) == 0:
        raise DatasetError(f"manifest at {manifest.root} is empty")
    accessor = ManifestAccessor(manifest, allow_poses=True)
    led_config, drop = scene_geometry(manifest)
    correct = 0
    n_robots = 0
    uv: list[float] = []
    psi: list[float] = []
    d: list[float] = []
    position: list[float] = []
    for i in range(len(accessor)):
        truths = [frame_truth(i, p, accessor.leds(i), intr, led_config, drop) for p in accessor.poses(i)]
        image = load_image(manifest.image_path(manifest.records[i]))
        estimates = estimate_multi_pose(
            model, image, cal, intr, max_robots=max_robots, nms_radius=nms_radius, threshold=threshold
        )
        n_robots += len(truths)
        correct += int(len(estimates) == len(truths))
        predictions = [prediction_from_estimate(e, intr) for e in estimates]
        for ti, pi in match_by_pixel(truths, [(p.u, p.v) for p in predictions]):
            t, p = truths[ti], predictions[pi]
            uv.append(math.hypot(t.u - p.u, t.v - p.v))
            psi.append(circular_error(t.pose.psi, p.psi))
            d.append(abs(t.pose.distance - p.d) / t.pose.distance)
            position.append(t.pose.position_error(p.pose))

    report = MultiRobotReport(
        n_frames=len(accessor),
        count_accuracy=correct / len(accessor),
        n_robots=n_robots,
        n_matched=len(uv),
        e_uv=float(np.median(uv)) if uv else None,
        e_psi=float(np.median(psi)) if psi else None,
        e_d=float(np.mean(d)) if d else None,
        gamma=pose_accuracy_gamma(list(zip(position, psi, strict=True)), GAMMA_POSITION, GAMMA_ANGLE) if uv else None,
    )
    logger.info(
        "Multi-robot: %d/%d frames with the right count, %d of %d robots matched",
        correct,
        report.n_frames,
        report.n_matched,
        n_robots,
    )
    return report


__all__ = ["evaluate_multi_robot", "match_by_pixel"]
