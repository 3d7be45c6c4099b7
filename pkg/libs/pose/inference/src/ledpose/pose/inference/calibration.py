"""Distance calibration records: the metric coefficient d_c and how scale mass maps to distance."""

from __future__ import annotations

import logging
from enum import StrEnum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ledpose.platform.config import dump_config_file, load_config_file
from ledpose.pose.core import CalibrationError, CameraIntrinsics

logger = logging.getLogger(__name__)

CALIBRATION_NAME = "calibration.yaml"


class DistanceWeights(StrEnum):
    """How per-scale presence mass turns into a relative distance.

    ``geometric`` weights scale s by s itself: mass at scale 1/4 means the robot
    looked four times larger than the receptive field, hence four times closer
    than d_c. ``inverse`` weights it by 1/s.
    """

    GEOMETRIC = "geometric"
    INVERSE = "inverse"


class Calibration(BaseModel):
    model_config = ConfigDict(frozen=True)

    scale_factors: tuple[float, ...]
    d_c: float = Field(gt=0, description="meters")
    receptive_field: int = Field(gt=0, description="pixels at scale 1")
    distance_weights: DistanceWeights = DistanceWeights.GEOMETRIC
    method: str = "image"
    intrinsics: CameraIntrinsics | None = None

    @model_validator(mode="after")
    def _check_factors(self) -> Calibration:
        if not self.scale_factors or any(s <= 0 for s in self.scale_factors):
            raise ValueError("scale factors must be positive")
        return self

    def weights(self) -> tuple[float, ...]:
        if self.distance_weights is DistanceWeights.INVERSE:
            return tuple(1.0 / s for s in self.scale_factors)
        return tuple(self.scale_factors)

    def check_scales(self, scale_factors: tuple[float, ...]) -> None:
        if tuple(scale_factors) != tuple(self.scale_factors):
            raise CalibrationError(
                f"calibration was made for scales {self.scale_factors}, the model runs {tuple(scale_factors)}"
            )

    def save(self, path: Path) -> Path:
        dump_config_file(path, self.model_dump(mode="json"))
        return path

    @classmethod
    def load(cls, path: Path) -> Calibration:
        """
        Raises:
            CalibrationError: If the file is missing or malformed
        """
        try:
            return cls.model_validate(load_config_file(path))
        except FileNotFoundError as e:
            raise CalibrationError(f"calibration file not found: {path}") from e
        except ValueError as e:
            raise CalibrationError(f"invalid calibration file {path}: {e}") from e


__all__ = ["CALIBRATION_NAME", "Calibration", "DistanceWeights"]
