"""Typed runtime settings read from ``LEDPOSE_*`` environment variables."""
from __future__ import annotations

import logging
from typing import Any, ClassVar, Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class SettingsBase(BaseSettings):
    """Base class for ledpose settings models with sensible defaults."""

    model_config: ClassVar[SettingsConfigDict] = SettingsConfigDict(
        env_prefix="LEDPOSE_",
        env_nested_delimiter="__",
        extra="ignore",
    )

    def describe(self) -> dict[str, Any]:
        """Return a representation safe for logging."""

        return self.model_dump(mode="json", exclude_none=True)


class RuntimeSettings(SettingsBase):
    """Process-wide knobs that are not part of any experiment config."""

    device: Literal["auto", "cpu", "cuda", "mps"] = Field(default="auto")
    log_level: str = Field(default="WARNING")
    num_workers: int = Field(default=0, ge=0)
    deterministic: bool = Field(default=True)

    def resolve_device(self) -> str:
        """Map ``auto`` to the best available torch device."""

        if self.device != "auto":
            return self.device
        import torch

        if torch.cuda.is_available():
            return "cuda"
        return "cpu"

    def log_level_number(self) -> int:
        level = logging.getLevelName(self.log_level.upper())
        return level if isinstance(level, int) else logging.WARNING


__all__ = ["RuntimeSettings", "SettingsBase"]
