"""End-to-end pose estimation: network, multi-scale fusion, readout and back-projection."""

from __future__ import annotations

import logging

import numpy as np
import torch
from numpy.typing import NDArray
from pydantic import BaseModel, Field
from torch import Tensor

from ledpose.pose.core import CameraIntrinsics, InvalidInputError, Pose2D, back_project
from ledpose.pose.inference.calibration import Calibration
from ledpose.pose.inference.extract import PEAK_THRESHOLD, extract_robots
from ledpose.pose.inference.readout import (
    RESULTANT_EPS,
    bearing_resultant,
    detect_presence_entropy,
    detect_presence_max,
    estimate_bearing,
    estimate_distance,
    localize,
    read_led_states,
    uncalibrated_distance,
)
from ledpose.pose.model import LedPoseNet, MultiScaleStack, image_to_tensor, multi_scale_forward, receptive_field

logger = logging.getLogger(__name__)


class PoseEstimate(BaseModel):
    """Everything inferred about one robot in one image."""

    u: float
    v: float
    psi: float
    d: float | None = Field(default=None, description="meters; None without calibration")
    d_relative: float = Field(description="scale-mass distance before calibration")
    led_probs: list[float]
    presence_score: float = Field(ge=0.0, le=1.0)
    presence_raw: float
    confidence: float = Field(ge=0.0, le=1.0, description="entropy-based presence confidence")
    bearing_reliable: bool = True

    def pose(self, intr: CameraIntrinsics) -> Pose2D | None:
        """Metric pose in the camera frame, when a distance is available."""
        if self.d is None:
            return None
        return back_project(intr, self.u, self.v, self.d, self.psi)

    def record(self) -> dict[str, object]:
        return self.model_dump(mode="json")


def as_batch(image: NDArray[np.floating] | Tensor, device: str | torch.device | None = None) -> Tensor:
    """H×W×3 array, (3, H, W) tensor or (B, 3, H, W) tensor to a (B, 3, H, W) float tensor."""
    if isinstance(image, np.ndarray):
        batch = image_to_tensor(image)
    elif image.ndim == 3:
        batch = image[None]
    else:
        batch = image
    batch = batch.float()
    return batch.to(device) if device is not None else batch


def _check_intrinsics(stack: MultiScaleStack, intr: CameraIntrinsics | None) -> None:
    if intr is not None and (intr.width, intr.height) != stack.image_size:
        raise InvalidInputError(
            f"intrinsics describe a {intr.width}x{intr.height} image, the model takes "
            f"{stack.image_size[0]}x{stack.image_size[1]}"
        )


def estimates_from_stack(
    stack: MultiScaleStack,
    cal: Calibration | None,
    intr: CameraIntrinsics | None = None,
) -> list[PoseEstimate]:
    """One estimate per batch element."""
    _check_intrinsics(stack, intr)
    if cal is not None:
        cal.check_scales(stack.scale_factors)
    uv = localize(stack, intr).double().cpu()
    psi = estimate_bearing(stack).double().cpu()
    reliable = (torch.linalg.vector_norm(bearing_resultant(stack), dim=1) >= RESULTANT_EPS).cpu()
    relative = uncalibrated_distance(stack, cal.weights() if cal is not None else None).double().cpu()
    distance = estimate_distance(stack, cal).double().cpu() if cal is not None else None
    leds = read_led_states(stack).double().cpu()
    presence = detect_presence_max(stack)
    confidence = detect_presence_entropy(leds)
    estimates: list[PoseEstimate] = []
    for i in range(stack.batch_size):
        estimates.append(
            PoseEstimate(
                u=float(uv[i, 0]),
                v=float(uv[i, 1]),
                psi=float(psi[i]),
                d=float(distance[i]) if distance is not None else None,
                d_relative=float(relative[i]),
                led_probs=[float(p) for p in leds[i]],
                presence_score=float(presence.score[i]),
                presence_raw=float(presence.raw[i]),
                confidence=float(confidence[i]),
                bearing_reliable=bool(reliable[i]),
            )
        )
    return estimates


@torch.no_grad()
def run_stack(model: LedPoseNet, image: NDArray[np.floating] | Tensor) -> MultiScaleStack:
    """Eval-mode multi-scale forward on the model's device."""
    model.eval()
    device = next(model.parameters()).device
    return multi_scale_forward(model, as_batch(image, device))


def estimate_pose(
    model: LedPoseNet,
    image: NDArray[np.floating] | Tensor,
    cal: Calibration | None,
    intr: CameraIntrinsics | None = None,
) -> PoseEstimate:
    """Single-robot estimate for one image."""
    stack = run_stack(model, image)
    if stack.batch_size != 1:
        raise InvalidInputError("estimate_pose takes a single image; use estimate_poses for batches")
    return estimates_from_stack(stack, cal, intr)[0]


def estimate_poses(
    model: LedPoseNet,
    images: Tensor,
    cal: Calibration | None,
    intr: CameraIntrinsics | None = None,
) -> list[PoseEstimate]:
    """Single-robot estimates for a (B, 3, H, W) batch."""
    return estimates_from_stack(run_stack(model, images), cal, intr)


def estimate_multi_pose(
    model: LedPoseNet,
    image: NDArray[np.floating] | Tensor,
    cal: Calibration | None,
    intr: CameraIntrinsics | None = None,
    *,
    max_robots: int = 4,
    nms_radius: float | None = None,
    threshold: float = PEAK_THRESHOLD,
) -> list[PoseEstimate]:
    """One estimate per robot found in the image, strongest first."""
    stack = run_stack(model, image)
    radius = nms_radius if nms_radius is not None else receptive_field(model.cfg) / model.cfg.downsample
    candidates = extract_robots(stack, max_robots=max_robots, nms_radius=radius, threshold=threshold)
    return [estimates_from_stack(c.stack, cal, intr)[0] for c in candidates]


__all__ = [
    "PoseEstimate",
    "as_batch",
    "estimate_multi_pose",
    "estimate_pose",
    "estimate_poses",
    "estimates_from_stack",
    "run_stack",
]
