"""Ground-truth LED visibility for a robot seen at a given bearing."""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ledpose.pose.core import InvalidInputError, LedConfiguration

# Weights at or below this are treated as facing away (cos(pi/2) is not exactly 0 in floating point).
VISIBILITY_EPS = 1e-9


def led_visibility_oracle(psi: ArrayLike, led_config: LedConfiguration) -> NDArray[np.float64]:
    """Clamped-cosine visibility of each LED, normalized to sum to one.

    ``psi`` may be a scalar or an array; the result has shape ``psi.shape + (K,)``.
    """
    angles = np.asarray(psi, dtype=np.float64)
    if not np.all(np.isfinite(angles)):
        raise InvalidInputError("bearing must be finite")
    cosines = np.cos(angles[..., None] + led_config.mount_bearings)
    lobes = np.maximum(cosines, 0.0)
    total = lobes.sum(axis=-1, keepdims=True)
    # K < 3 can leave every LED facing away; the most frontal one then takes all the weight
    nearest = (np.arange(led_config.count) == np.argmax(cosines, axis=-1)[..., None]).astype(np.float64)
    return np.where(total > 0.0, lobes / np.where(total > 0.0, total, 1.0), nearest)


def visible_leds(psi: float, led_config: LedConfiguration) -> NDArray[np.bool_]:
    """LEDs whose oracle weight is positive at bearing ``psi``."""
    return led_visibility_oracle(psi, led_config) > VISIBILITY_EPS


__all__ = ["VISIBILITY_EPS", "led_visibility_oracle", "visible_leds"]
