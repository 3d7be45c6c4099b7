"""Training and augmentation configuration."""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class AugmentConfig(BaseModel):
    """Photometric augmentation applied to training images only; labels are never touched."""

    model_config = ConfigDict(frozen=True)

    enabled: bool = True
    noise: bool = Field(default=True, description="multiplicative smooth gradient noise")
    noise_amplitude: float = Field(default=0.3, ge=0.0, lt=1.0, description="gain stays in [1 - a, 1 + a]")
    noise_cell: float = Field(default=48.0, gt=0, description="lattice spacing of the coarsest octave, pixels")
    noise_octaves: int = Field(default=2, ge=1)
    jitter: bool = Field(default=True, description="global brightness, contrast and saturation jitter")
    brightness: float = Field(default=0.2, ge=0.0, lt=1.0)
    contrast: float = Field(default=0.2, ge=0.0, lt=1.0)
    saturation: float = Field(default=0.2, ge=0.0, lt=1.0)

    @classmethod
    def off(cls) -> AugmentConfig:
        return cls(enabled=False)


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epochs: int = Field(default=100, ge=1)
    lr_initial: float = Field(default=1e-3, gt=0)
    lr_final: float = Field(default=1e-4, gt=0)
    schedule: Literal["cosine"] = "cosine"
    batch_size: int = Field(default=32, ge=1)
    seed: int = Field(default=0, ge=0)
    augment: AugmentConfig = Field(default_factory=AugmentConfig)
    max_samples: int | None = Field(default=None, ge=1, description="use only the first N training frames")
    resume_from: Path | None = None
    permute_labels: bool = Field(default=False, description="null control: shuffle LED labels across frames")
    device: str = "cpu"
    num_workers: int = Field(default=0, ge=0)
    deterministic: bool = True

    @model_validator(mode="after")
    def _check_rates(self) -> TrainConfig:
        if self.lr_final > self.lr_initial:
            raise ValueError(f"final learning rate {self.lr_final} exceeds initial {self.lr_initial}")
        return self


__all__ = ["AugmentConfig", "TrainConfig"]
