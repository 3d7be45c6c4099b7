"""Flat-shaded rendering of the target robot and its LEDs over procedural backgrounds."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from ledpose.pose.core import (
    InvalidInputError,
    LedStateVector,
    Pose2D,
    gradient_noise,
    project_pose,
)
from ledpose.pose.synth.scene import BackgroundStyle, SceneConfig
from ledpose.pose.synth.visibility import led_visibility_oracle, visible_leds

logger = logging.getLogger(__name__)

FloatImage = NDArray[np.float32]

_PALETTE_SALT = 0x1ED5
_BODY_FRONT = np.array([0.62, 0.16, 0.12])
_BODY_BACK = np.array([0.22, 0.24, 0.28])
_LED_ON = np.array([0.55, 1.0, 0.45])
_LED_OFF = np.array([0.05, 0.06, 0.05])
_LED_ROW = 0.35  # fraction of the silhouette height, from the top
_LED_SPREAD = 0.7  # fraction of the half-width an edge-on LED reaches
_LED_RADIUS = 0.07  # fraction of the side


@dataclass(slots=True)
class Sample:
    """One rendered frame with its labels."""

    image: FloatImage
    led_states: LedStateVector
    gt_pose: Pose2D | None
    visible: bool
    frame_id: int = 0
    poses: list[Pose2D] = field(default_factory=lambda: [])

    def __post_init__(self) -> None:
        if self.visible != (self.gt_pose is not None):
            raise InvalidInputError("gt_pose must be present iff the robot is visible")


def domain_palette(domain_id: int) -> NDArray[np.float64]:
    """Four base colors (wall, floor, clutter, clutter) fixed by the domain id."""
    rng = np.random.default_rng([_PALETTE_SALT, domain_id])
    return rng.uniform(0.12, 0.88, size=(4, 3))


def _pixel_grid(height: int, width: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    ys, xs = np.mgrid[0:height, 0:width].astype(np.float64)
    return ys + 0.5, xs + 0.5


def render_background(scene: SceneConfig, rng: np.random.Generator) -> FloatImage:
    """Wall above the horizon, floor below, then the style-specific detail."""
    h, w = scene.height, scene.width
    palette = domain_palette(scene.domain_id)
    jitter = rng.uniform(-0.06, 0.06, size=(2, 3))
    image = np.empty((h, w, 3), dtype=np.float64)
    horizon = int(round(scene.intrinsics.cy))
    image[:horizon] = palette[0] + jitter[0]
    image[horizon:] = palette[1] + jitter[1]

    if scene.background is BackgroundStyle.CLUTTER:
        ys, xs = _pixel_grid(h, w)
        for _ in range(int(rng.integers(6, 15))):
            cx, cy = rng.uniform(0, w), rng.uniform(0, h)
            rx, ry = rng.uniform(0.03, 0.15) * w, rng.uniform(0.03, 0.15) * w
            color = palette[2 + int(rng.integers(0, 2))] + rng.uniform(-0.1, 0.1, size=3)
            if rng.random() < 0.5:
                mask = (np.abs(xs - cx) < rx) & (np.abs(ys - cy) < ry)
            else:
                mask = ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 < 1.0
            image[mask] = color
    elif scene.background is BackgroundStyle.TEXTURED:
        cell = w / (4.0 + 2.0 * (scene.domain_id % 4))
        tex = gradient_noise(h, w, cell, rng, octaves=3)[..., None]
        image = image * (1.0 + 0.35 * tex) + 0.25 * np.clip(tex, 0.0, None) * (palette[2] - image)

    image *= rng.uniform(0.85, 1.15)
    image += rng.normal(0.0, 0.01, size=image.shape)
    return np.clip(image, 0.0, 1.0).astype(np.float32)


def silhouette_box(scene: SceneConfig, pose: Pose2D) -> tuple[float, float, float, float]:
    """(left, top, right, bottom) of the robot silhouette in pixels."""
    u, v = project_pose(scene.intrinsics, pose, scene.camera_drop)
    half = scene.apparent_size(pose.distance) / 2.0
    return u - half, v - half, u + half, v + half


def led_anchor(scene: SceneConfig, pose: Pose2D, k: int) -> tuple[float, float]:
    """Image position of LED ``k``; LEDs facing the camera sit at the center line."""
    left, top, right, bottom = silhouette_box(scene, pose)
    half = (right - left) / 2.0
    mount = scene.led_config.mount_bearings[k]
    x = (left + right) / 2.0 + math.sin(pose.psi + mount) * half * _LED_SPREAD
    y = top + (bottom - top) * _LED_ROW
    return x, y


def in_view(scene: SceneConfig, pose: Pose2D) -> bool:
    """True when any part of the silhouette lands inside the image."""
    if pose.x <= 0:
        return False
    left, top, right, bottom = silhouette_box(scene, pose)
    return right > 0 and left < scene.width and bottom > 0 and top < scene.height


def _draw_robot(image: NDArray[np.float64], scene: SceneConfig, pose: Pose2D, leds: LedStateVector) -> None:
    h, w = image.shape[:2]
    ys, xs = _pixel_grid(h, w)
    left, top, right, bottom = silhouette_box(scene, pose)
    side = right - left
    u = (left + right) / 2.0

    body = (xs >= left) & (xs < right) & (ys >= top) & (ys < bottom)
    frontal = (1.0 + math.cos(pose.psi)) / 2.0
    color = frontal * _BODY_FRONT + (1.0 - frontal) * _BODY_BACK
    # the side turned toward the camera catches more light
    shade = 1.0 + 0.2 * math.sin(pose.psi) * (xs - u) / max(side / 2.0, 1e-6)
    chassis = np.where(ys > top + 0.75 * side, 0.45, 1.0)
    image[body] = (color[None, None, :] * (shade * chassis)[..., None])[body]

    weights = led_visibility_oracle(pose.psi, scene.led_config)
    shown = visible_leds(pose.psi, scene.led_config)
    radius = max(1.0, _LED_RADIUS * side)
    for k in np.argsort(weights, kind="stable"):
        if not shown[k]:
            continue
        lx, ly = led_anchor(scene, pose, int(k))
        dist = np.hypot(xs - lx, ys - ly)
        core = np.clip(1.5 - dist / radius, 0.0, 1.0)[..., None]
        if leds.states[k]:
            glow = 0.3 * np.exp(-((dist / (2.0 * radius)) ** 2))[..., None]
            image[:] = image * (1.0 - core) + _LED_ON * core + glow * _LED_ON
        else:
            image[:] = image * (1.0 - core) + _LED_OFF * core


def _check_pose(scene: SceneConfig, pose: Pose2D) -> None:
    near, far = scene.distance_range
    if not (near - 1e-9 <= pose.distance <= far + 1e-9):
        raise InvalidInputError(f"pose distance {pose.distance:.3f} m is outside the scene range {scene.distance_range}")


def render_frame(
    scene: SceneConfig,
    pose: Pose2D | None,
    leds: LedStateVector,
    rng: np.random.Generator,
    frame_id: int = 0,
) -> Sample:
    """Render one frame; ``pose=None`` gives an empty frame that still carries LED labels."""
    leds.validate_for(scene.led_config)
    image = render_background(scene, rng).astype(np.float64)
    if pose is not None:
        _check_pose(scene, pose)
        if not in_view(scene, pose):
            logger.debug("Frame %d: pose %s projects outside the image", frame_id, pose)
            pose = None
        else:
            _draw_robot(image, scene, pose, leds)
    return Sample(
        image=np.clip(image, 0.0, 1.0).astype(np.float32),
        led_states=leds,
        gt_pose=pose,
        visible=pose is not None,
        frame_id=frame_id,
        poses=[pose] if pose is not None else [],
    )


def render_multi_frame(
    scene: SceneConfig,
    poses: Sequence[Pose2D],
    leds: LedStateVector,
    rng: np.random.Generator,
    frame_id: int = 0,
) -> Sample:
    """Composite several robots sharing one LED state vector, far robots drawn first.

    ``gt_pose`` is the first in-view pose in the given order.
    """
    leds.validate_for(scene.led_config)
    image = render_background(scene, rng).astype(np.float64)
    kept: list[Pose2D] = []
    for pose in poses:
        _check_pose(scene, pose)
        if in_view(scene, pose):
            kept.append(pose)
    for pose in sorted(kept, key=lambda p: p.distance, reverse=True):
        _draw_robot(image, scene, pose, leds)
    return Sample(
        image=np.clip(image, 0.0, 1.0).astype(np.float32),
        led_states=leds,
        gt_pose=kept[0] if kept else None,
        visible=bool(kept),
        frame_id=frame_id,
        poses=kept,
    )


__all__ = [
    "Sample",
    "domain_palette",
    "in_view",
    "led_anchor",
    "render_background",
    "render_frame",
    "render_multi_frame",
    "silhouette_box",
]
