"""Several robots in one frame: peaks of the rescaled presence maps, one windowed stack per peak."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from ledpose.pose.core import InvalidInputError
from ledpose.pose.model import MultiScaleStack

logger = logging.getLogger(__name__)

PEAK_THRESHOLD = 0.5


@dataclass(slots=True)
class RobotCandidate:
    row: int
    col: int
    strength: float
    stack: MultiScaleStack


def _local_maxima(summed: torch.Tensor) -> torch.Tensor:
    pooled = F.max_pool2d(summed[None, None], kernel_size=3, stride=1, padding=1)[0, 0]
    return summed >= pooled


def extract_robots(
    stack: MultiScaleStack,
    max_robots: int = 4,
    nms_radius: float = 8.75,
    threshold: float = PEAK_THRESHOLD,
) -> list[RobotCandidate]:
    """
    Split a single-image stack into one normalized stack per detected robot.

    Raw presence logits are min-max rescaled jointly over scales into [0, 1]
    and softmax-normalized. Local maxima of the scale-summed map whose
    rescaled value reaches ``threshold`` are kept strongest first, dropping any
    within ``nms_radius`` cells of a stronger one. Each survivor gets the
    original stack with presence renormalized inside a window of half-size
    ``nms_radius`` around it.

    Args:
        stack: Stack with a batch dimension of 1
        max_robots: Upper bound on returned candidates
        nms_radius: Suppression radius in cells (default: 70 px receptive field / 8)
        threshold: Minimum rescaled logit for a peak

    Returns:
        Candidates sorted by decreasing strength; empty for a constant map
    """
    if stack.batch_size != 1:
        raise InvalidInputError("extract_robots works on one image at a time")
    if max_robots < 1 or nms_radius < 0:
        raise InvalidInputError("max_robots must be positive and nms_radius non-negative")
    logits = stack.presence_logits[0]  # (S, H, W)
    lo, hi = logits.min(), logits.max()
    if float(hi - lo) <= 1e-12:
        return []
    rescaled = (logits - lo) / (hi - lo)
    normalized = torch.softmax(rescaled.flatten(), dim=0).reshape(rescaled.shape)
    summed = normalized.sum(dim=0)
    strongest = rescaled.max(dim=0).values

    peaks = torch.nonzero(_local_maxima(summed) & (strongest >= threshold))
    order = torch.argsort(summed[peaks[:, 0], peaks[:, 1]], descending=True, stable=True)
    kept: list[tuple[int, int]] = []
    for idx in order.tolist():
        r, c = (int(x) for x in peaks[idx])
        if all((r - kr) ** 2 + (c - kc) ** 2 > nms_radius**2 for kr, kc in kept):
            kept.append((r, c))
        if len(kept) == max_robots:
            break

    h, w = stack.grid
    rows = torch.arange(h, device=logits.device)[:, None]
    cols = torch.arange(w, device=logits.device)[None, :]
    candidates: list[RobotCandidate] = []
    for r, c in kept:
        window = ((rows - r).abs() <= nms_radius) & ((cols - c).abs() <= nms_radius)
        # raw logits: the window keeps the full-frame softmax ratios, only renormalized
        masked = stack.presence_logits.masked_fill(~window, float("-inf"))
        presence = torch.softmax(masked.flatten(start_dim=1), dim=1).reshape(masked.shape)
        windowed = MultiScaleStack(
            presence_logits=stack.presence_logits,
            presence=presence,
            bearing=stack.bearing,
            led_logits=stack.led_logits,
            scale_factors=stack.scale_factors,
            image_size=stack.image_size,
            maps=stack.maps,
        )
        candidates.append(RobotCandidate(r, c, float(summed[r, c]), windowed))
    logger.debug("Extracted %d robot(s) from %d local maxima", len(candidates), len(peaks))
    return candidates


__all__ = ["PEAK_THRESHOLD", "RobotCandidate", "extract_robots"]
