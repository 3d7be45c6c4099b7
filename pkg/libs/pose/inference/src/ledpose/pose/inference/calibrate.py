"""Single-image distance calibration."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray
from torch import Tensor

from ledpose.pose.core import CalibrationError, CameraIntrinsics, InvalidInputError
from ledpose.pose.inference.calibration import Calibration, DistanceWeights
from ledpose.pose.inference.pose import run_stack
from ledpose.pose.inference.readout import detect_presence_entropy, read_led_states, uncalibrated_distance
from ledpose.pose.model import LedPoseNet, ModelConfig, MultiScaleStack, receptive_field

logger = logging.getLogger(__name__)

MIN_CONFIDENCE = 0.1


@dataclass(slots=True)
class CalibrationRequest:
    """One image of the robot at a measured distance in meters."""

    image: NDArray[np.floating] | Tensor
    true_distance: float

    def __post_init__(self) -> None:
        if not self.true_distance > 0:
            raise InvalidInputError(f"true distance must be positive, got {self.true_distance}")


def _check_intrinsics(cfg: ModelConfig, intr: CameraIntrinsics | None) -> None:
    if intr is not None and (intr.width, intr.height) != (cfg.input_width, cfg.input_height):
        raise InvalidInputError(
            f"intrinsics describe a {intr.width}x{intr.height} image, the model takes "
            f"{cfg.input_width}x{cfg.input_height}"
        )


def calibrate_from_image(
    model: LedPoseNet,
    request: CalibrationRequest,
    intr: CameraIntrinsics | None = None,
    *,
    min_confidence: float = MIN_CONFIDENCE,
    distance_weights: DistanceWeights = DistanceWeights.GEOMETRIC,
) -> Calibration:
    """
    Derive d_c so the model reports ``request.true_distance`` on ``request.image``.

    Args:
        model: Trained network
        request: Calibration image and its annotated distance
        intr: Camera intrinsics stored alongside the coefficient
        min_confidence: Entropy confidence the image must reach before it is trusted
        distance_weights: Scale weighting baked into the calibration

    Returns:
        Calibration with d_c = true_distance / uncalibrated distance

    Raises:
        CalibrationError: If the robot is not confidently detected in the image
    """
    _check_intrinsics(model.cfg, intr)
    stack = run_stack(model, request.image)
    return calibrate_from_stack(
        stack,
        request.true_distance,
        receptive_field(model.cfg),
        intr,
        min_confidence=min_confidence,
        distance_weights=distance_weights,
    )


def calibrate_from_stack(
    stack: MultiScaleStack,
    true_distance: float,
    rf: int,
    intr: CameraIntrinsics | None = None,
    *,
    min_confidence: float = MIN_CONFIDENCE,
    distance_weights: DistanceWeights = DistanceWeights.GEOMETRIC,
) -> Calibration:
    """Ratio calibration on an already computed single-image stack."""
    if stack.batch_size != 1:
        raise InvalidInputError("calibration takes exactly one image")
    if not true_distance > 0:
        raise InvalidInputError(f"true distance must be positive, got {true_distance}")
    confidence = float(detect_presence_entropy(read_led_states(stack))[0])
    if confidence < min_confidence:
        raise CalibrationError(
            f"robot not detected in the calibration image (confidence {confidence:.3f} < {min_confidence})"
        )
    draft = Calibration(
        scale_factors=tuple(stack.scale_factors),
        d_c=1.0,
        receptive_field=rf,
        distance_weights=distance_weights,
    )
    relative = float(uncalibrated_distance(stack, draft.weights()).double()[0])
    if not relative > 0:
        raise CalibrationError("uncalibrated distance is zero on the calibration image")
    d_c = true_distance / relative
    logger.info("Calibrated d_c=%.4f m from d'=%.4f at %.3f m", d_c, relative, true_distance)
    return draft.model_copy(update={"d_c": d_c, "method": "image", "intrinsics": intr})


def calibrate_from_rf_distance(
    d_rf: float,
    cfg: ModelConfig,
    intr: CameraIntrinsics | None = None,
    *,
    distance_weights: DistanceWeights = DistanceWeights.GEOMETRIC,
) -> Calibration:
    """Calibration from the distance at which the robot spans exactly one receptive field."""
    if not d_rf > 0:
        raise InvalidInputError(f"receptive-field distance must be positive, got {d_rf}")
    _check_intrinsics(cfg, intr)
    return Calibration(
        scale_factors=tuple(cfg.scale_factors),
        d_c=d_rf,
        receptive_field=receptive_field(cfg),
        distance_weights=distance_weights,
        method="receptive_field",
        intrinsics=intr,
    )


__all__ = [
    "MIN_CONFIDENCE",
    "CalibrationRequest",
    "calibrate_from_image",
    "calibrate_from_rf_distance",
    "calibrate_from_stack",
]
