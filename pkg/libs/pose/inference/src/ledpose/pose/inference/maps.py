"""Grayscale visualization of the per-scale output maps."""

from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from ledpose.pose.core import InvalidInputError, save_image
from ledpose.pose.model import MultiScaleStack

logger = logging.getLogger(__name__)

TILE_GAP = 1


def _rescale(values: NDArray[np.float64]) -> NDArray[np.float64]:
    lo, hi = float(values.min()), float(values.max())
    if hi - lo <= 1e-12:
        return np.zeros_like(values)
    return (values - lo) / (hi - lo)


def scale_tiles(stack: MultiScaleStack, scale_index: int) -> list[NDArray[np.float64]]:
    """Presence (min-max per scale), bearing mapped from (-pi, pi] to [0, 1], then one tile per LED."""
    presence = stack.presence[0, scale_index].detach().double().cpu().numpy()
    bearing = stack.bearing_angle[0, scale_index].detach().double().cpu().numpy()
    leds = stack.led_probs[0, scale_index].detach().double().cpu().numpy()
    tiles = [_rescale(presence), (bearing + math.pi) / (2.0 * math.pi)]
    tiles.extend(leds[k] for k in range(leds.shape[0]))
    return tiles


def tile_row(tiles: list[NDArray[np.float64]], upscale: int = 4) -> NDArray[np.float64]:
    h, w = tiles[0].shape
    h_up, w_up = h * upscale, w * upscale
    row = np.ones((h_up, len(tiles) * (w_up + TILE_GAP) - TILE_GAP), dtype=np.float64)
    for i, tile in enumerate(tiles):
        x0 = i * (w_up + TILE_GAP)
        row[:, x0 : x0 + w_up] = np.repeat(np.repeat(tile, upscale, axis=0), upscale, axis=1)
    return row


def dump_maps(stack: MultiScaleStack, out_dir: Path, *, prefix: str = "maps", upscale: int = 4) -> list[Path]:
    """
    Write one grayscale PNG per scale for a single-image stack.

    Args:
        stack: Stack with a batch dimension of 1
        out_dir: Target directory, created if needed
        prefix: File name prefix; files are ``{prefix}_s{index}.png``
        upscale: Nearest-neighbor enlargement of every cell

    Returns:
        Written paths, one per scale in stack order
    """
    if stack.batch_size != 1:
        raise InvalidInputError("dump_maps works on one image at a time")
    if upscale < 1:
        raise InvalidInputError("upscale must be at least 1")
    paths: list[Path] = []
    for i, scale in enumerate(stack.scale_factors):
        path = out_dir / f"{prefix}_s{i}.png"
        save_image(path, tile_row(scale_tiles(stack, i), upscale))
        logger.debug("Wrote maps for scale %.3f to %s", scale, path)
        paths.append(path)
    return paths


__all__ = ["dump_maps", "scale_tiles", "tile_row"]
