"""Photometric augmentation: multiplicative gradient noise followed by color jitter."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from ledpose.pose.core import gradient_noise
from ledpose.pose.training.config import AugmentConfig

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def noise_gain(height: int, width: int, rng: np.random.Generator, cfg: AugmentConfig) -> NDArray[np.float64]:
    """Smooth gain field with values in [1 - a, 1 + a]."""
    field = gradient_noise(height, width, cfg.noise_cell, rng, octaves=cfg.noise_octaves)
    return 1.0 + cfg.noise_amplitude * field


def color_jitter(image: NDArray[np.float64], rng: np.random.Generator, cfg: AugmentConfig) -> NDArray[np.float64]:
    brightness = rng.uniform(1.0 - cfg.brightness, 1.0 + cfg.brightness)
    contrast = rng.uniform(1.0 - cfg.contrast, 1.0 + cfg.contrast)
    saturation = rng.uniform(1.0 - cfg.saturation, 1.0 + cfg.saturation)
    out = image * brightness
    mean = out.mean()
    out = (out - mean) * contrast + mean
    gray = (out @ _LUMA)[..., None]
    return (out - gray) * saturation + gray


def augment(image: NDArray[np.floating], rng: np.random.Generator, cfg: AugmentConfig) -> NDArray[np.float32]:
    """Augment an H×W×3 image in [0, 1]; the result is clipped back to [0, 1]."""
    if not cfg.enabled:
        return np.asarray(image, dtype=np.float32)
    out = np.asarray(image, dtype=np.float64)
    if cfg.noise:
        out = out * noise_gain(out.shape[0], out.shape[1], rng, cfg)[..., None]
    if cfg.jitter:
        out = color_jitter(out, rng, cfg)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


__all__ = ["augment", "color_jitter", "noise_gain"]
