"""Self-supervised LED-state objective over the multi-scale stack."""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
from torch import Tensor

from ledpose.pose.core import InvalidInputError
from ledpose.pose.model.network import MultiScaleStack

BCE_EPS = 1e-7


@dataclass(slots=True)
class LossBreakdown:
    """``total`` equals ``per_led.mean()`` and ``per_scale.sum()``."""

    total: Tensor
    per_led: Tensor
    per_scale: Tensor

    def as_floats(self) -> dict[str, float | list[float]]:
        return {
            "total": float(self.total.detach()),
            "per_led": [float(v) for v in self.per_led.detach()],
            "per_scale": [float(v) for v in self.per_scale.detach()],
        }


def bce_map(probs: Tensor, labels: Tensor | float, eps: float = BCE_EPS) -> Tensor:
    """Cellwise binary cross-entropy with probabilities clamped to [eps, 1 - eps]."""
    if bool(torch.any(torch.isnan(probs))) or bool(torch.any((probs < 0) | (probs > 1))):
        raise InvalidInputError("probabilities must lie in [0, 1]")
    p = probs.clamp(eps, 1.0 - eps)
    lab = torch.as_tensor(labels, dtype=probs.dtype, device=probs.device)
    return -(lab * torch.log(p) + (1.0 - lab) * torch.log1p(-p))


def chance_loss(led_count: int) -> float:
    """Loss of a model that predicts 0.5 for every LED everywhere: ln 2 / K."""
    return math.log(2.0) / led_count


def visibility_weights(bearing: Tensor, led_count: int) -> Tensor:
    """Clamped-cosine LED visibility per cell, normalized over the K LEDs.

    ``bearing`` holds unit (cos, sin) pairs along dim -3; the result replaces
    that dimension with K. cos(psi + a_k) is expanded as c*cos(a_k) - s*sin(a_k)
    so gradients reach the pair directly.
    """
    if led_count < 1:
        raise InvalidInputError("led_count must be positive")
    mounts = torch.arange(led_count, dtype=bearing.dtype, device=bearing.device) * (2.0 * math.pi / led_count)
    shape = [1] * bearing.ndim
    shape[-3] = led_count
    cos_a = torch.cos(mounts).reshape(shape)
    sin_a = torch.sin(mounts).reshape(shape)
    c = bearing.narrow(-3, 0, 1)
    s = bearing.narrow(-3, 1, 1)
    cosines = c * cos_a - s * sin_a
    lobes = cosines.clamp_min(0.0)
    total = lobes.sum(dim=-3, keepdim=True)
    positive = total > 0
    weights = lobes / torch.where(positive, total, torch.ones_like(total))
    # with K < 3 every LED can face away; the most frontal one then takes all the weight
    nearest = torch.zeros_like(cosines).scatter_(-3, cosines.argmax(dim=-3, keepdim=True), 1.0)
    return torch.where(positive, weights, nearest)


def localization_loss(led_loss: Tensor, presence: Tensor) -> Tensor:
    """Weight an LED loss map by a normalized presence map of the same shape."""
    if led_loss.shape != presence.shape:
        raise InvalidInputError(f"shape mismatch: {tuple(led_loss.shape)} vs {tuple(presence.shape)}")
    return led_loss * presence


def _label_tensor(labels: Tensor, stack: MultiScaleStack) -> Tensor:
    lab = torch.as_tensor(labels, dtype=stack.led_logits.dtype, device=stack.led_logits.device)
    if lab.ndim == 1:
        lab = lab[None].expand(stack.batch_size, -1)
    if lab.ndim != 2 or lab.shape[0] != stack.batch_size:
        raise InvalidInputError(f"labels must be (K,) or (B, K), got {tuple(lab.shape)}")
    if lab.shape[1] != stack.led_count:
        raise InvalidInputError(f"expected {stack.led_count} LED labels, got {lab.shape[1]}")
    return lab


def multi_scale_loss(stack: MultiScaleStack, labels: Tensor) -> LossBreakdown:
    """Presence- and visibility-weighted LED BCE summed over scales and cells, averaged over LEDs.

    Each image's loss is computed on its own; the batch value is the mean over images.
    """
    lab = _label_tensor(labels, stack)
    k = stack.led_count
    bce = bce_map(stack.led_probs, lab[:, None, :, None, None])  # (B, S, K, H, W)
    presence = stack.presence[:, :, None]  # (B, S, 1, H, W)
    cells = localization_loss(bce, presence.expand_as(bce)) * visibility_weights(stack.bearing, k)
    per_image_led = cells.sum(dim=(1, 3, 4))  # (B, K)
    per_image_scale = cells.sum(dim=(3, 4)).mean(dim=2)  # (B, S)
    return LossBreakdown(
        total=per_image_led.mean(dim=1).mean(),
        per_led=per_image_led.mean(dim=0),
        per_scale=per_image_scale.mean(dim=0),
    )


__all__ = [
    "BCE_EPS",
    "LossBreakdown",
    "bce_map",
    "chance_loss",
    "localization_loss",
    "multi_scale_loss",
    "visibility_weights",
]
