"""Readout of location, bearing, distance, LED states and presence from a normalized multi-scale stack.

Every function takes a batched stack and returns one value per image.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import Tensor

from ledpose.pose.core import CalibrationError, CameraIntrinsics
from ledpose.pose.inference.calibration import Calibration
from ledpose.pose.model import MultiScaleStack

RESULTANT_EPS = 1e-8
ENTROPY_EPS = 1e-12


def localize(stack: MultiScaleStack, intr: CameraIntrinsics | None = None) -> Tensor:
    """Presence barycenter in pixels, (B, 2) as (u, v); u follows columns, v rows, cell centers at +0.5."""
    width, height = (intr.width, intr.height) if intr is not None else stack.image_size
    h, w = stack.grid
    mass = stack.presence.sum(dim=1)  # (B, H, W)
    rows = torch.arange(h, dtype=mass.dtype, device=mass.device) + 0.5
    cols = torch.arange(w, dtype=mass.dtype, device=mass.device) + 0.5
    u = (mass.sum(dim=1) * cols).sum(dim=1) * (width / w)
    v = (mass.sum(dim=2) * rows).sum(dim=1) * (height / h)
    return torch.stack([u, v], dim=1)


def bearing_resultant(stack: MultiScaleStack) -> Tensor:
    """Presence-weighted mean of the unit bearing pairs, (B, 2)."""
    return (stack.presence[:, :, None] * stack.bearing).sum(dim=(1, 3, 4))


def estimate_bearing(stack: MultiScaleStack) -> Tensor:
    """Circular presence-weighted mean bearing, (B,); 0 where the resultant vanishes."""
    resultant = bearing_resultant(stack)
    psi = torch.atan2(resultant[:, 1], resultant[:, 0])
    degenerate = torch.linalg.vector_norm(resultant, dim=1) < RESULTANT_EPS
    return torch.where(degenerate, torch.zeros_like(psi), psi)


def scale_mass(stack: MultiScaleStack) -> Tensor:
    """Presence mass per scale, (B, S)."""
    return stack.presence.sum(dim=(2, 3))


def uncalibrated_distance(stack: MultiScaleStack, weights: tuple[float, ...] | None = None) -> Tensor:
    """Scale-mass combination before the metric coefficient, (B,). Defaults to weighting scale s by s."""
    f = torch.as_tensor(
        weights if weights is not None else stack.scale_factors,
        dtype=stack.presence.dtype,
        device=stack.presence.device,
    )
    return (scale_mass(stack) * f).sum(dim=1)


def estimate_distance(stack: MultiScaleStack, cal: Calibration | None) -> Tensor:
    """Metric distance in meters, (B,) float64.

    Raises:
        CalibrationError: If ``cal`` is missing or was made for other scales
    """
    if cal is None:
        raise CalibrationError("distance estimation needs a calibration")
    cal.check_scales(stack.scale_factors)
    return cal.d_c * uncalibrated_distance(stack, cal.weights()).double()


def read_led_states(stack: MultiScaleStack) -> Tensor:
    """Presence-weighted LED probabilities, (B, K)."""
    return (stack.presence[:, :, None] * stack.led_probs).sum(dim=(1, 3, 4))


@dataclass(slots=True)
class PresenceMax:
    """``raw`` is the largest normalized presence cell; ``score`` maps uniform to 0 and one-hot to 1."""

    raw: Tensor
    score: Tensor


def detect_presence_max(stack: MultiScaleStack) -> PresenceMax:
    n = stack.presence[0].numel()
    raw = stack.presence.flatten(start_dim=1).max(dim=1).values
    if n == 1:
        return PresenceMax(raw=raw, score=torch.ones_like(raw))
    score = ((raw * n - 1.0) / (n - 1.0)).clamp(0.0, 1.0)
    return PresenceMax(raw=raw, score=score)


def binary_entropy(probs: Tensor) -> Tensor:
    """Base-2 entropy of Bernoulli probabilities."""
    p = probs.clamp(ENTROPY_EPS, 1.0 - ENTROPY_EPS)
    return -(p * torch.log2(p) + (1.0 - p) * torch.log2(1.0 - p))


def detect_presence_entropy(led_probs: Tensor) -> Tensor:
    """Mean over the last (LED) dimension of 1 - H2(p); in [0, 1]."""
    return (1.0 - binary_entropy(led_probs)).mean(dim=-1).clamp(0.0, 1.0)


__all__ = [
    "ENTROPY_EPS",
    "RESULTANT_EPS",
    "PresenceMax",
    "bearing_resultant",
    "binary_entropy",
    "detect_presence_entropy",
    "detect_presence_max",
    "estimate_bearing",
    "estimate_distance",
    "localize",
    "read_led_states",
    "scale_mass",
    "uncalibrated_distance",
]
