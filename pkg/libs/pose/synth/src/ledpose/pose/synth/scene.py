"""Scene description for the synthetic rig."""

from __future__ import annotations

import logging
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ledpose.platform.config import dump_config_file, load_config_file
from ledpose.pose.core import CameraIntrinsics, LedConfiguration

logger = logging.getLogger(__name__)


class BackgroundStyle(StrEnum):
    FLAT = "flat"
    CLUTTER = "clutter"
    TEXTURED = "textured"


def _desk_intrinsics() -> CameraIntrinsics:
    return CameraIntrinsics.from_fov(320, 176)


class SceneConfig(BaseModel):
    """Everything the renderer and the frame planner need to know about the rig."""

    model_config = ConfigDict(frozen=True)

    intrinsics: CameraIntrinsics = Field(default_factory=_desk_intrinsics)
    led_config: LedConfiguration = Field(default_factory=LedConfiguration)
    robot_size: float = Field(default=0.3, gt=0, description="meters; side of the square silhouette")
    distance_range: tuple[float, float] = (0.5, 4.0)
    visible_fraction: float = Field(default=0.23, ge=0.0, le=1.0)
    boundary_fraction: float = Field(default=0.1, ge=0.0, le=1.0, description="visible frames cut by the frame edge")
    background: BackgroundStyle = BackgroundStyle.CLUTTER
    domain_id: int = Field(default=0, ge=0)
    toggle_period: int = Field(default=10, ge=1, description="frames an LED state is held")
    led_on_probability: float = Field(default=0.5, ge=0.0, le=1.0)
    camera_drop: float = Field(default=0.05, ge=0.0, description="meters the robot center sits below the optical axis")
    split_fractions: tuple[float, float, float] = (0.885, 0.076, 0.039)

    @model_validator(mode="after")
    def _check_ranges(self) -> SceneConfig:
        near, far = self.distance_range
        if not (0 < near < far):
            raise ValueError(f"distance range must be positive and non-empty, got {self.distance_range}")
        if any(f < 0 for f in self.split_fractions) or abs(sum(self.split_fractions) - 1.0) > 1e-6:
            raise ValueError("split fractions must be non-negative and sum to 1")
        return self

    @property
    def width(self) -> int:
        return self.intrinsics.width

    @property
    def height(self) -> int:
        return self.intrinsics.height

    def apparent_size(self, distance: float) -> float:
        """Side of the robot silhouette in pixels at ``distance`` meters."""
        return self.robot_size * self.intrinsics.fx / distance

    def rf_distance(self, receptive_field: int) -> float:
        """Distance at which the robot spans ``receptive_field`` pixels."""
        return self.robot_size * self.intrinsics.fx / receptive_field

    def save(self, path: Path) -> None:
        dump_config_file(path, self.model_dump(mode="json"))

    @classmethod
    def load(cls, path: Path) -> SceneConfig:
        return cls.model_validate(load_config_file(path))


__all__ = ["BackgroundStyle", "SceneConfig"]
