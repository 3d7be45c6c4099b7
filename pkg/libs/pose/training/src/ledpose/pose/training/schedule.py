"""Learning-rate schedule, per-epoch history and best-epoch selection."""

from __future__ import annotations

import json
import math
from collections.abc import Sequence
from pathlib import Path

from pydantic import BaseModel, Field

from ledpose.pose.core import DatasetError, InvalidInputError
from ledpose.pose.training.config import TrainConfig

HISTORY_NAME = "history.jsonl"


def lr_at(epoch: int, cfg: TrainConfig) -> float:
    """Cosine interpolation from ``lr_initial`` at epoch 0 to ``lr_final`` at the last epoch."""
    if not 0 <= epoch < cfg.epochs:
        raise InvalidInputError(f"epoch {epoch} outside [0, {cfg.epochs})")
    if cfg.epochs == 1:
        return cfg.lr_initial
    weight = (1.0 + math.cos(math.pi * epoch / (cfg.epochs - 1))) / 2.0
    return cfg.lr_final + (cfg.lr_initial - cfg.lr_final) * weight


class EpochRecord(BaseModel):
    epoch: int = Field(ge=0)
    train_loss: float
    val_loss: float
    lr: float

    def to_line(self) -> str:
        return json.dumps(self.model_dump(mode="json"))


class TrainHistory(BaseModel):
    records: list[EpochRecord] = Field(default_factory=list)

    def append(self, record: EpochRecord) -> None:
        self.records.append(record)

    @property
    def val_losses(self) -> list[float]:
        return [r.val_loss for r in self.records]

    @property
    def best_epoch(self) -> int:
        return early_stop_select(self.val_losses)

    @property
    def best_val_loss(self) -> float:
        return self.records[self.best_epoch].val_loss

    def write(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(f".{path.name}.tmp")
        tmp.write_text("".join(r.to_line() + "\n" for r in self.records), encoding="utf-8")
        tmp.replace(path)
        return path

    @classmethod
    def load(cls, path: Path) -> TrainHistory:
        try:
            lines = path.read_text(encoding="utf-8").splitlines()
        except FileNotFoundError as e:
            raise DatasetError(f"history not found: {path}") from e
        return cls(records=[EpochRecord.model_validate_json(line) for line in lines if line.strip()])


def early_stop_select(history: Sequence[float] | TrainHistory) -> int:
    """Index of the smallest validation loss, earliest on ties."""
    losses = history.val_losses if isinstance(history, TrainHistory) else list(history)
    if not losses:
        raise InvalidInputError("history is empty")
    best = 0
    for i, loss in enumerate(losses):
        if loss < losses[best]:
            best = i
    return best


__all__ = ["HISTORY_NAME", "EpochRecord", "TrainHistory", "early_stop_select", "lr_at"]
