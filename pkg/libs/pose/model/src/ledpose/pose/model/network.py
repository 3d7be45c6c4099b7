"""Backbone, per-scale output maps and the multi-scale forward pass."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import torch
import torch.nn.functional as F
from numpy.typing import NDArray
from torch import Tensor, nn

from ledpose.pose.core import InvalidInputError
from ledpose.pose.model.config import ModelConfig, receptive_field

logger = logging.getLogger(__name__)

ZERO_BEARING_EPS = 1e-8


def conv_bn(inp: int, oup: int, kernel_size: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(inp, oup, kernel_size, padding=kernel_size // 2, bias=False),
        nn.BatchNorm2d(oup),
        nn.ReLU(inplace=True),
    )


class LedPoseNet(nn.Module):
    """Fully-convolutional backbone with a 1x1 head of 3 + K channels per cell."""

    def __init__(self, cfg: ModelConfig):
        super().__init__()
        self.cfg = cfg
        layers: list[nn.Module] = []
        inp = 3
        for block, width in enumerate(cfg.channels):
            layers.append(conv_bn(inp, width, cfg.kernel_size))
            if block < cfg.pooled_blocks:
                layers.append(nn.MaxPool2d(2))
            inp = width
        self.features = nn.Sequential(*layers)
        self.head = nn.Conv2d(inp, cfg.head_channels, 1)

    def forward(self, x: Tensor) -> Tensor:
        return self.head(self.features(x))


def count_parameters(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())


def build_model(cfg: ModelConfig, seed: int) -> LedPoseNet:
    """Initialize a network deterministically from ``seed`` without touching the global torch RNG."""
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        model = LedPoseNet(cfg)
    logger.info(
        "Built model: %d parameters, receptive field %d px, grid %dx%d",
        count_parameters(model),
        receptive_field(cfg),
        *cfg.grid_shape(1.0),
    )
    return model


def normalize_bearing(pair: Tensor) -> Tensor:
    """Unit-normalize (cos, sin) pairs along dim -3; pairs with norm < 1e-8 become (1, 0)."""
    # clamped so the backward pass stays finite at exactly-zero pairs
    norm = torch.sqrt((pair * pair).sum(dim=-3, keepdim=True).clamp_min(1e-30))
    degenerate = norm < ZERO_BEARING_EPS
    unit = pair / torch.where(degenerate, torch.ones_like(norm), norm)
    fallback = torch.zeros_like(pair)
    fallback.narrow(-3, 0, 1).fill_(1.0)
    return torch.where(degenerate, fallback, unit)


@dataclass(slots=True)
class OutputMaps:
    """Maps of one scale, batched: presence (B, H, W), bearing (B, 2, H, W), LED logits (B, K, H, W)."""

    presence_logits: Tensor
    bearing: Tensor
    led_logits: Tensor
    scale: float

    def __post_init__(self) -> None:
        grid = self.presence_logits.shape[-2:]
        if self.bearing.shape[-2:] != grid or self.led_logits.shape[-2:] != grid:
            raise InvalidInputError("presence, bearing and LED maps must share one grid")
        if self.bearing.shape[-3] != 2:
            raise InvalidInputError("bearing maps hold (cos, sin) pairs")

    @property
    def led_probs(self) -> Tensor:
        return torch.sigmoid(self.led_logits)

    @property
    def bearing_angle(self) -> Tensor:
        return torch.atan2(self.bearing[:, 1], self.bearing[:, 0])

    @property
    def grid(self) -> tuple[int, int]:
        """(height, width)."""
        h, w = self.presence_logits.shape[-2:]
        return int(h), int(w)

    @classmethod
    def from_head(cls, raw: Tensor, scale: float) -> OutputMaps:
        return cls(
            presence_logits=raw[:, 0],
            bearing=normalize_bearing(raw[:, 1:3]),
            led_logits=raw[:, 3:],
            scale=scale,
        )


@dataclass(slots=True)
class MultiScaleStack:
    """Per-scale maps aligned on the scale-1 grid, with presence softmax-normalized over (scale, row, col).

    Shapes: presence and presence_logits (B, S, H, W); bearing (B, S, 2, H, W);
    led_logits (B, S, K, H, W).
    """

    presence_logits: Tensor
    presence: Tensor
    bearing: Tensor
    led_logits: Tensor
    scale_factors: tuple[float, ...]
    image_size: tuple[int, int]
    maps: list[OutputMaps]

    @property
    def led_probs(self) -> Tensor:
        return torch.sigmoid(self.led_logits)

    @property
    def bearing_angle(self) -> Tensor:
        return torch.atan2(self.bearing[:, :, 1], self.bearing[:, :, 0])

    @property
    def grid(self) -> tuple[int, int]:
        """(height, width) of the aligned grid."""
        h, w = self.presence.shape[-2:]
        return int(h), int(w)

    @property
    def batch_size(self) -> int:
        return int(self.presence.shape[0])

    @property
    def led_count(self) -> int:
        return int(self.led_logits.shape[2])

    def select(self, index: int) -> MultiScaleStack:
        """The stack of one batch element, keeping a batch dimension of 1."""
        sl = slice(index, index + 1)
        return MultiScaleStack(
            presence_logits=self.presence_logits[sl],
            presence=self.presence[sl],
            bearing=self.bearing[sl],
            led_logits=self.led_logits[sl],
            scale_factors=self.scale_factors,
            image_size=self.image_size,
            maps=[
                OutputMaps(m.presence_logits[sl], m.bearing[sl], m.led_logits[sl], m.scale) for m in self.maps
            ],
        )

    @classmethod
    def from_maps(cls, maps: Sequence[OutputMaps], image_size: tuple[int, int]) -> MultiScaleStack:
        """Upscale every scale bilinearly to the first grid and normalize presence jointly.

        ``image_size`` is the native (width, height) in pixels.
        """
        if not maps:
            raise InvalidInputError("at least one scale is required")
        size = maps[0].grid

        def up(t: Tensor) -> Tensor:
            if tuple(t.shape[-2:]) == size:
                return t
            return F.interpolate(t, size=size, mode="bilinear", align_corners=False)

        presence_logits = torch.stack([up(m.presence_logits[:, None])[:, 0] for m in maps], dim=1)
        bearing = torch.stack([normalize_bearing(up(m.bearing)) for m in maps], dim=1)
        led_logits = torch.stack([up(m.led_logits) for m in maps], dim=1)
        b, s, h, w = presence_logits.shape
        presence = torch.softmax(presence_logits.reshape(b, -1), dim=1).reshape(b, s, h, w)
        return cls(
            presence_logits=presence_logits,
            presence=presence,
            bearing=bearing,
            led_logits=led_logits,
            scale_factors=tuple(m.scale for m in maps),
            image_size=image_size,
            maps=list(maps),
        )


def image_to_tensor(image: NDArray[np.floating]) -> Tensor:
    """H×W×3 array in [0, 1] to a (1, 3, H, W) float32 tensor."""
    arr = np.asarray(image, dtype=np.float32)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise InvalidInputError(f"expected an HxWx3 image, got shape {arr.shape}")
    return torch.from_numpy(np.ascontiguousarray(arr.transpose(2, 0, 1)))[None]


def downscale(image: Tensor, cfg: ModelConfig, scale: float) -> Tensor:
    """Average-pool a native-resolution batch to ``scale``."""
    k = cfg.pool_kernel(scale)
    return image if k == 1 else F.avg_pool2d(image, kernel_size=k)


def _check_input(model: LedPoseNet, image: Tensor, scale: float) -> None:
    if image.ndim != 4 or image.shape[1] != 3:
        raise InvalidInputError(f"expected a (B, 3, H, W) batch, got {tuple(image.shape)}")
    w, h = model.cfg.scaled_input(scale)
    if tuple(image.shape[-2:]) != (h, w):
        raise InvalidInputError(
            f"image of {image.shape[-1]}x{image.shape[-2]} does not match {w}x{h} expected at scale {scale}"
        )


def forward(model: LedPoseNet, image: Tensor, scale: float = 1.0) -> OutputMaps:
    """One pass over an image already resized for ``scale``."""
    _check_input(model, image, scale)
    return OutputMaps.from_head(model(image), scale)


def multi_scale_forward(
    model: LedPoseNet,
    image: Tensor,
    scale_factors: Sequence[float] | None = None,
) -> MultiScaleStack:
    """Run every scale on a native-resolution batch and fuse the maps."""
    cfg = model.cfg
    factors = tuple(scale_factors) if scale_factors is not None else cfg.scale_factors
    _check_input(model, image, 1.0)
    maps: list[OutputMaps] = []
    for s in factors:
        w, h = cfg.grid_shape(s)
        if w < 1 or h < 1:
            raise InvalidInputError(f"scale {s} produces an empty output grid")
        maps.append(forward(model, downscale(image, cfg, s), s))
    return MultiScaleStack.from_maps(maps, (cfg.input_width, cfg.input_height))


__all__ = [
    "ZERO_BEARING_EPS",
    "LedPoseNet",
    "MultiScaleStack",
    "OutputMaps",
    "build_model",
    "conv_bn",
    "count_parameters",
    "downscale",
    "forward",
    "image_to_tensor",
    "multi_scale_forward",
    "normalize_bearing",
]
