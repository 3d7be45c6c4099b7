"""Self-describing checkpoint files: config, parameters and training metadata."""

from __future__ import annotations

import logging
import pickle
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import torch
from pydantic import ValidationError

from ledpose.pose.core import DatasetError
from ledpose.pose.model.config import ModelConfig
from ledpose.pose.model.network import LedPoseNet

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class Checkpoint:
    config: ModelConfig
    state_dict: dict[str, torch.Tensor]
    meta: dict[str, Any] = field(default_factory=lambda: {})

    def build(self, device: str | torch.device = "cpu") -> LedPoseNet:
        """A network holding these parameters, in eval mode."""
        model = LedPoseNet(self.config)
        model.load_state_dict(self.state_dict)
        return model.to(device).eval()


def save_checkpoint(path: Path, model: LedPoseNet, meta: dict[str, Any] | None = None) -> Path:
    """Write ``model`` with its config and ``meta`` (mode, epoch, val_loss, history, parent...)."""
    payload = {
        "config": model.cfg.model_dump(mode="json"),
        "state_dict": {k: v.detach().cpu().clone() for k, v in model.state_dict().items()},
        "meta": dict(meta or {}),
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    torch.save(payload, tmp)
    tmp.replace(path)
    logger.debug("Saved checkpoint %s", path)
    return path


def load_checkpoint(path: Path) -> Checkpoint:
    """
    Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        DatasetError: If the file is missing or not a ledpose checkpoint
    """
    if not path.is_file():
        raise DatasetError(f"checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
        config = ModelConfig.model_validate(payload["config"])
        return Checkpoint(config=config, state_dict=payload["state_dict"], meta=dict(payload.get("meta", {})))
    except (KeyError, TypeError, EOFError, ValidationError, RuntimeError, pickle.UnpicklingError) as e:
        raise DatasetError(f"{path} is not a valid checkpoint: {e}") from e


def load_model(path: Path, device: str | torch.device = "cpu") -> tuple[LedPoseNet, Checkpoint]:
    checkpoint = load_checkpoint(path)
    return checkpoint.build(device), checkpoint


__all__ = ["Checkpoint", "load_checkpoint", "load_model", "save_checkpoint"]
