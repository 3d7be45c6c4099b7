"""Metric reports, persisted as flat ``key: value`` YAML."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Self

from pydantic import BaseModel, ConfigDict, Field

from ledpose.platform.config import dump_config_file, load_config_file
from ledpose.pose.core import DatasetError

REPORT_NAME = "metrics.yaml"


class _FlatReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    def save(self, path: Path) -> Path:
        dump_config_file(path, self.model_dump(mode="json"))
        return path

    @classmethod
    def load(cls, path: Path) -> Self:
        try:
            return cls.model_validate(load_config_file(path))
        except FileNotFoundError as e:
            raise DatasetError(f"report not found: {path}") from e


class MetricsReport(_FlatReport):
    """Pose and LED metrics over visible-robot frames."""

    label: str = ""
    subset: str | None = None
    e_uv: float = Field(ge=0, description="median pixel error")
    e_psi: float = Field(ge=0, description="median circular bearing error, radians")
    e_d: float = Field(ge=0, description="mean absolute percentage distance error, as a fraction")
    auc_led: float | None = Field(default=None, ge=0, le=1, description="None when no LED saw both states")
    gamma: float = Field(ge=0, le=1, description="fraction under 1 m and 45 degrees")
    n_samples: int = Field(gt=0)

    @property
    def e_psi_deg(self) -> float:
        return math.degrees(self.e_psi)

    def row(self) -> dict[str, str]:
        """Display strings in table column order."""
        return {
            "model": self.label or "-",
            "AUC": f"{self.auc_led:.1%}" if self.auc_led is not None else "-",
            "E_uv [px]": f"{self.e_uv:.1f}",
            "E_psi [deg]": f"{self.e_psi_deg:.1f}",
            "E_d": f"{self.e_d:.1%}",
            "Gamma": f"{self.gamma:.1%}",
            "n": str(self.n_samples),
        }


class DetectionReport(_FlatReport):
    """Robot-presence AUC of the two detection scores."""

    auc_max: float = Field(ge=0, le=1)
    auc_entropy: float = Field(ge=0, le=1)
    n_visible: int = Field(gt=0)
    n_empty: int = Field(gt=0)


class MultiRobotReport(_FlatReport):
    """Count accuracy and per-robot errors over matched (prediction, robot) pairs."""

    n_frames: int = Field(gt=0)
    count_accuracy: float = Field(ge=0, le=1)
    n_robots: int = Field(ge=0)
    n_matched: int = Field(ge=0)
    e_uv: float | None = None
    e_psi: float | None = None
    e_d: float | None = None
    gamma: float | None = None


__all__ = ["REPORT_NAME", "DetectionReport", "MetricsReport", "MultiRobotReport"]
