"""Smooth 2D gradient noise used for backgrounds and multiplicative augmentation."""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray


def _fade(t: NDArray[np.float64]) -> NDArray[np.float64]:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def _gradient_octave(height: int, width: int, cell: float, rng: np.random.Generator) -> NDArray[np.float64]:
    gh = int(np.ceil(height / cell)) + 2
    gw = int(np.ceil(width / cell)) + 2
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(gh, gw))
    gx, gy = np.cos(angles), np.sin(angles)

    ys = np.arange(height, dtype=np.float64) / cell
    xs = np.arange(width, dtype=np.float64) / cell
    y0 = np.floor(ys).astype(np.int64)
    x0 = np.floor(xs).astype(np.int64)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    yi = y0[:, None]
    xi = x0[None, :]

    def corner(dy: int, dx: int) -> NDArray[np.float64]:
        return gx[yi + dy, xi + dx] * (fx - dx) + gy[yi + dy, xi + dx] * (fy - dy)

    u, v = _fade(fx), _fade(fy)
    top = corner(0, 0) * (1 - u) + corner(0, 1) * u
    bottom = corner(1, 0) * (1 - u) + corner(1, 1) * u
    return (top * (1 - v) + bottom * v) * np.sqrt(2.0)


def gradient_noise(
    height: int,
    width: int,
    cell: float,
    rng: np.random.Generator,
    octaves: int = 1,
) -> NDArray[np.float64]:
    """Perlin-style noise field of shape (height, width) with values in [-1, 1].

    ``cell`` is the lattice spacing of the first octave in pixels; each further
    octave halves the spacing and the amplitude.
    """
    if height <= 0 or width <= 0 or cell <= 0 or octaves < 1:
        raise ValueError("noise dimensions, cell size and octave count must be positive")
    total = np.zeros((height, width), dtype=np.float64)
    norm = 0.0
    amplitude = 1.0
    for octave in range(octaves):
        total += amplitude * _gradient_octave(height, width, max(cell / (2**octave), 1.0), rng)
        norm += amplitude
        amplitude *= 0.5
    return np.clip(total / norm, -1.0, 1.0)
