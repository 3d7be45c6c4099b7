"""Planar pose types, angle arithmetic and the pinhole camera model.

Camera frame: ``x`` forward along the optical axis, ``y`` lateral (right
positive), image ``v`` grows downward. Angles are radians everywhere.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ledpose.pose.core.errors import InvalidInputError

TWO_PI = 2.0 * math.pi


def _require_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise InvalidInputError(f"{name} must be finite, got {value!r}")
    return value


def wrap_angle(theta: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    _require_finite("theta", theta)
    wrapped = math.pi - math.fmod(math.pi - theta, TWO_PI)
    if wrapped > math.pi:
        wrapped -= TWO_PI
    elif wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def wrap_angle_array(theta: ArrayLike) -> NDArray[np.float64]:
    """Vectorised :func:`wrap_angle`."""
    arr = np.asarray(theta, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("angles must be finite")
    return np.pi - np.mod(np.pi - arr, TWO_PI)


def circular_error(psi: float, psi_hat: float) -> float:
    """Absolute wrapped difference between two angles, in [0, pi]."""
    _require_finite("psi", psi)
    _require_finite("psi_hat", psi_hat)
    return abs(wrap_angle(psi - psi_hat))


def circular_mean(angles: ArrayLike, weights: ArrayLike | None = None) -> float:
    """Weighted circular mean; 0.0 when the resultant vanishes."""
    a = np.asarray(angles, dtype=np.float64)
    w = np.ones_like(a) if weights is None else np.asarray(weights, dtype=np.float64)
    s = float(np.sum(w * np.sin(a)))
    c = float(np.sum(w * np.cos(a)))
    if math.hypot(s, c) < 1e-12:
        return 0.0
    return wrap_angle(math.atan2(s, c))


class Pose2D(BaseModel):
    """Metric planar pose of the target robot in the camera frame."""

    model_config = ConfigDict(frozen=True)

    x: float = Field(description="meters, forward")
    y: float = Field(description="meters, lateral (right positive)")
    psi: float = Field(description="radians in (-pi, pi]")

    @field_validator("x", "y")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("position must be finite")
        return v

    @field_validator("psi")
    @classmethod
    def _wrap(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("psi must be finite")
        return wrap_angle(v)

    @property
    def distance(self) -> float:
        return math.hypot(self.x, self.y)

    def as_list(self) -> list[float]:
        return [self.x, self.y, self.psi]

    @classmethod
    def from_list(cls, values: Sequence[float]) -> Pose2D:
        x, y, psi = values
        return cls(x=x, y=y, psi=psi)

    def position_error(self, other: Pose2D) -> float:
        """Planar Euclidean distance between the two positions."""
        return math.hypot(self.x - other.x, self.y - other.y)


class CameraIntrinsics(BaseModel):
    """Pinhole intrinsics plus image size."""

    model_config = ConfigDict(frozen=True)

    fx: float = Field(gt=0)
    fy: float = Field(gt=0)
    cx: float
    cy: float
    width: int = Field(gt=0)
    height: int = Field(gt=0)

    @model_validator(mode="after")
    def _principal_point_inside(self) -> CameraIntrinsics:
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")
        return self

    @classmethod
    def from_fov(cls, width: int, height: int, hfov_deg: float = 70.0) -> CameraIntrinsics:
        """Square-pixel camera with the principal point at the image center."""
        f = (width / 2.0) / math.tan(math.radians(hfov_deg) / 2.0)
        return cls(fx=f, fy=f, cx=width / 2.0, cy=height / 2.0, width=width, height=height)

    def contains(self, u: float, v: float) -> bool:
        return 0.0 <= u <= self.width and 0.0 <= v <= self.height


class LedConfiguration(BaseModel):
    """K equidistant LEDs; LED k (0-based) is mounted at bearing 2*pi*k/K."""

    model_config = ConfigDict(frozen=True)

    count: int = Field(default=4, ge=1)

    @property
    def mount_bearings(self) -> NDArray[np.float64]:
        return TWO_PI / self.count * np.arange(self.count, dtype=np.float64)


class LedStateVector(BaseModel):
    """On/off state of each LED (True = on)."""

    model_config = ConfigDict(frozen=True)

    states: tuple[bool, ...]

    def validate_for(self, config: LedConfiguration) -> LedStateVector:
        if len(self.states) != config.count:
            raise InvalidInputError(f"expected {config.count} LED states, got {len(self.states)}")
        return self

    def as_array(self) -> NDArray[np.float64]:
        return np.asarray(self.states, dtype=np.float64)

    def as_bits(self) -> list[int]:
        return [int(s) for s in self.states]

    @classmethod
    def from_bits(cls, bits: Sequence[int | bool]) -> LedStateVector:
        return cls(states=tuple(bool(b) for b in bits))

    def __len__(self) -> int:
        return len(self.states)


def back_project(intr: CameraIntrinsics, u: float, v: float, d: float, psi: float) -> Pose2D:
    """Point on the ray through pixel (u, v) at distance ``d``, with the vertical component dropped."""
    for name, value in (("u", u), ("v", v), ("d", d), ("psi", psi)):
        _require_finite(name, value)
    if d <= 0:
        raise InvalidInputError(f"distance must be positive, got {d}")
    if not intr.contains(u, v):
        raise InvalidInputError(f"pixel ({u}, {v}) lies outside the {intr.width}x{intr.height} image")
    ray = np.array([1.0, (u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy])
    point = d * ray / np.linalg.norm(ray)
    return Pose2D(x=float(point[0]), y=float(point[1]), psi=psi)


def project_pose(intr: CameraIntrinsics, pose: Pose2D, drop: float = 0.0) -> tuple[float, float]:
    """Image location of a pose's center.

    ``drop`` is how far (meters) the robot center sits below the optical axis.
    """
    if pose.x <= 0:
        raise InvalidInputError("pose must lie in front of the camera")
    return intr.cx + intr.fx * pose.y / pose.x, intr.cy + intr.fy * drop / pose.x


def pose_accuracy_gamma(
    errors: Sequence[tuple[float, float]],
    pos_thresh: float = 1.0,
    ang_thresh: float = math.pi / 4,
) -> float:
    """Fraction of (position error, orientation error) pairs strictly under both thresholds."""
    if pos_thresh <= 0 or ang_thresh <= 0:
        raise InvalidInputError("thresholds must be positive")
    if len(errors) == 0:
        raise InvalidInputError("pose accuracy is undefined for an empty error list")
    hits = sum(1 for pos, ang in errors if pos < pos_thresh and ang < ang_thresh)
    return hits / len(errors)
