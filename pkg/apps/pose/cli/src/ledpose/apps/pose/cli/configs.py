"""Config layering for CLI commands: defaults, runtime settings, ``--config`` YAML, then flags."""

from __future__ import annotations

import logging
import math
from pathlib import Path
from enum import StrEnum
from typing import Any

from ledpose.platform.config import RuntimeSettings, layer_config, load_config_file
from ledpose.pose.core import CameraIntrinsics, DatasetError, DatasetManifest, InvalidInputError
from ledpose.pose.model import ModelConfig
from ledpose.pose.synth import SceneConfig
from ledpose.pose.training import TrainConfig

logger = logging.getLogger(__name__)

class Preset(StrEnum):
    """Layer widths: the desk-scale default or the full-resolution network."""

    DESK = "desk"
    FULL = "full"


CONFIG_SECTIONS = ("scene", "model", "train")


def read_config(path: Path | None) -> dict[str, Any]:
    """
    Sections of a ``--config`` file; an absent path yields no sections.

    Raises:
        InvalidInputError: If the file is missing, malformed or has unknown top-level sections
    """
    if path is None:
        return {}
    try:
        data = load_config_file(path)
    except (FileNotFoundError, ValueError) as e:
        raise InvalidInputError(str(e)) from e
    unknown = sorted(set(data) - set(CONFIG_SECTIONS))
    if unknown:
        raise InvalidInputError(f"{path}: unknown config sections {unknown}; expected {list(CONFIG_SECTIONS)}")
    for name, section in data.items():
        if not isinstance(section, dict):
            raise InvalidInputError(f"{path}: section {name!r} must be a mapping")
    logger.info("Read config sections %s from %s", sorted(data), path)
    return data


def parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise InvalidInputError(f"{flag} expects comma-separated numbers, got {text!r}") from e


def parse_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as e:
        raise InvalidInputError(f"{flag} expects comma-separated integers, got {text!r}") from e
    if not values or any(v < 1 for v in values):
        raise InvalidInputError(f"{flag} needs at least one positive integer")
    return values


def hfov_of(intr: CameraIntrinsics) -> float:
    return math.degrees(2.0 * math.atan(intr.width / 2.0 / intr.fx))


def scene_config(
    sections: dict[str, Any],
    *,
    width: int | None = None,
    height: int | None = None,
    hfov: float | None = None,
    overrides: dict[str, Any] | None = None,
) -> SceneConfig:
    """Scene from defaults, the ``scene`` section and flag overrides; camera flags rebuild the intrinsics."""
    data = layer_config(sections.get("scene"), overrides=overrides)
    if width is not None or height is not None or hfov is not None:
        base = SceneConfig.model_validate(data).intrinsics
        intr = CameraIntrinsics.from_fov(width or base.width, height or base.height, hfov or hfov_of(base))
        data["intrinsics"] = intr.model_dump()
    return SceneConfig.model_validate(data)


def dataset_scene(manifest: DatasetManifest) -> SceneConfig:
    """
    Raises:
        DatasetError: If the dataset carries no ``scene.yaml``
    """
    if not manifest.scene:
        raise DatasetError(f"dataset at {manifest.root} has no scene.yaml; regenerate it with gen-data")
    return SceneConfig.model_validate(manifest.scene)


def model_config(sections: dict[str, Any], preset: Preset, scene: SceneConfig) -> ModelConfig:
    """Preset widths, then the ``model`` section; input size and LED count always follow the dataset."""
    base = ModelConfig.full() if preset is Preset.FULL else ModelConfig.desk()
    data = layer_config(
        base.model_dump(),
        sections.get("model"),
        overrides={
            "input_width": scene.intrinsics.width,
            "input_height": scene.intrinsics.height,
            "led_count": scene.led_config.count,
        },
    )
    return ModelConfig.model_validate(data)


def train_config(sections: dict[str, Any], settings: RuntimeSettings, overrides: dict[str, Any]) -> TrainConfig:
    runtime = {
        "device": settings.resolve_device(),
        "num_workers": settings.num_workers,
        "deterministic": settings.deterministic,
    }
    return TrainConfig.model_validate(layer_config(runtime, sections.get("train"), overrides=overrides))


def check_input_size(cfg: ModelConfig, intr: CameraIntrinsics) -> None:
    if (intr.width, intr.height) != (cfg.input_width, cfg.input_height):
        raise InvalidInputError(
            f"images are {intr.width}x{intr.height}, the model takes {cfg.input_width}x{cfg.input_height}"
        )


__all__ = [
    "CONFIG_SECTIONS",
    "Preset",
    "check_input_size",
    "dataset_scene",
    "hfov_of",
    "model_config",
    "parse_floats",
    "parse_ints",
    "read_config",
    "scene_config",
    "train_config",
]
