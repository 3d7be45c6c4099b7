"""Pose, LED and detection metrics over a test manifest."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Sequence

import numpy as np
import torch
from torch import Tensor

from ledpose.pose.core import (
    CameraIntrinsics,
    DatasetError,
    DatasetManifest,
    InvalidInputError,
    ManifestAccessor,
    circular_error,
    load_image,
    pose_accuracy_gamma,
)
from ledpose.pose.evaluation.auc import auc_binary
from ledpose.pose.evaluation.predictors import FramePrediction, NetworkPredictor, Predictor
from ledpose.pose.evaluation.report import DetectionReport, MetricsReport
from ledpose.pose.evaluation.truth import FrameTruth, Subset, frame_truths
from ledpose.pose.inference import Calibration, detect_presence_entropy, detect_presence_max, read_led_states, run_stack
from ledpose.pose.model import LedPoseNet

logger = logging.getLogger(__name__)

GAMMA_POSITION = 1.0
GAMMA_ANGLE = math.pi / 4


def image_batches(
    manifest: DatasetManifest, indices: Sequence[int], batch_size: int
) -> Iterator[tuple[list[int], Tensor]]:
    """(indices, (B, 3, H, W) tensor) chunks of the given frames, in order."""
    if batch_size < 1:
        raise InvalidInputError("batch size must be at least 1")
    for start in range(0, len(indices), batch_size):
        chunk = list(indices[start : start + batch_size])
        images = np.stack([load_image(manifest.image_path(manifest.records[i])) for i in chunk])
        yield chunk, torch.from_numpy(np.ascontiguousarray(images.transpose(0, 3, 1, 2)))


def led_auc(truths: Sequence[FrameTruth], predictions: Sequence[FramePrediction]) -> float | None:
    """
    LED-state AUC averaged over LEDs, each scored only on frames where it faces the camera.

    LEDs that never show both states on their frames are left out; None when no LED qualifies.
    """
    led_count = len(truths[0].leds)
    aucs: list[float] = []
    for k in range(led_count):
        scores = [p.led_probs[k] for t, p in zip(truths, predictions, strict=True) if t.led_visible[k]]
        labels = [bool(t.leds[k] > 0.5) for t in truths if t.led_visible[k]]
        if 0 < sum(labels) < len(labels):
            aucs.append(auc_binary(scores, labels))
    if not aucs:
        return None
    return float(np.mean(aucs))


def summarize(
    truths: Sequence[FrameTruth],
    predictions: Sequence[FramePrediction],
    *,
    label: str = "",
    subset: Subset | None = None,
) -> MetricsReport:
    """
    Reduce paired ground truth and predictions to a :class:`MetricsReport`.

    Args:
        truths: Visible-robot frames
        predictions: One prediction per truth, same order
        label: Row name in rendered tables
        subset: Recorded in the report

    Raises:
        InvalidInputError: If the sequences are empty or differ in length
    """
    if not truths:
        raise InvalidInputError("nothing to evaluate")
    if len(truths) != len(predictions):
        raise InvalidInputError(f"{len(predictions)} predictions for {len(truths)} frames")
    uv = [math.hypot(t.u - p.u, t.v - p.v) for t, p in zip(truths, predictions, strict=True)]
    psi = [circular_error(t.pose.psi, p.psi) for t, p in zip(truths, predictions, strict=True)]
    d = [abs(t.pose.distance - p.d) / t.pose.distance for t, p in zip(truths, predictions, strict=True)]
    position = [t.pose.position_error(p.pose) for t, p in zip(truths, predictions, strict=True)]
    return MetricsReport(
        label=label,
        subset=subset,
        e_uv=float(np.median(uv)),
        e_psi=float(np.median(psi)),
        e_d=float(np.mean(d)),
        auc_led=led_auc(truths, predictions),
        gamma=pose_accuracy_gamma(list(zip(position, psi, strict=True)), GAMMA_POSITION, GAMMA_ANGLE),
        n_samples=len(truths),
    )


def evaluate_predictor(
    predictor: Predictor,
    manifest: DatasetManifest,
    intr: CameraIntrinsics,
    *,
    subset: Subset | None = None,
    batch_size: int = 32,
    label: str = "",
) -> MetricsReport:
    """
    Run ``predictor`` on every visible-robot frame of ``manifest`` and summarize.

    Raises:
        DatasetError: If the manifest (or the subset) has no visible-robot frames
    """
    truths = frame_truths(manifest, intr, subset)
    predictions: list[FramePrediction] = []
    for _, images in image_batches(manifest, [t.index for t in truths], batch_size):
        predictions.extend(predictor.predict(images))
    report = summarize(truths, predictions, label=label, subset=subset)
    logger.info(
        "Evaluated %s on %d frames: E_uv %.2f px, E_psi %.1f deg, E_d %.1f%%, Gamma %.1f%%",
        label or "predictor",
        report.n_samples,
        report.e_uv,
        report.e_psi_deg,
        100 * report.e_d,
        100 * report.gamma,
    )
    return report


def evaluate(
    model: LedPoseNet,
    manifest: DatasetManifest,
    cal: Calibration,
    intr: CameraIntrinsics,
    *,
    subset: Subset | None = None,
    batch_size: int = 32,
    label: str = "ours",
) -> MetricsReport:
    """Metrics of a calibrated network on the visible-robot frames of ``manifest``."""
    predictor = NetworkPredictor(model, cal, intr)
    return evaluate_predictor(predictor, manifest, intr, subset=subset, batch_size=batch_size, label=label)


def evaluate_detection(model: LedPoseNet, manifest: DatasetManifest, *, batch_size: int = 32) -> DetectionReport:
    """
    Presence AUC of the max-presence score and the LED-entropy score against the visible flag.

    Raises:
        DatasetError: If the manifest lacks either visible or empty frames
    """
    accessor = ManifestAccessor(manifest, allow_poses=True)
    visible = np.array([accessor.visible(i) for i in range(len(accessor))], dtype=bool)
    n_visible = int(visible.sum())
    if n_visible == 0 or n_visible == len(visible):
        raise DatasetError("detection needs both frames with and without a robot")
    max_scores: list[float] = []
    entropy_scores: list[float] = []
    for _, images in image_batches(manifest, range(len(accessor)), batch_size):
        stack = run_stack(model, images)
        max_scores.extend(detect_presence_max(stack).raw.double().cpu().tolist())
        entropy_scores.extend(detect_presence_entropy(read_led_states(stack)).double().cpu().tolist())
    report = DetectionReport(
        auc_max=auc_binary(max_scores, visible),
        auc_entropy=auc_binary(entropy_scores, visible),
        n_visible=n_visible,
        n_empty=len(visible) - n_visible,
    )
    logger.info("Detection AUC: max %.3f, entropy %.3f", report.auc_max, report.auc_entropy)
    return report


__all__ = [
    "GAMMA_ANGLE",
    "GAMMA_POSITION",
    "evaluate",
    "evaluate_detection",
    "evaluate_predictor",
    "image_batches",
    "led_auc",
    "summarize",
]
