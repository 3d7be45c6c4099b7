"""Epoch loop shared by self-supervised training, fine-tuning and the supervised upperbound."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import torch
from torch import Tensor
from torch.utils.data import DataLoader

from ledpose.pose.core import DatasetError, DatasetManifest, InvalidInputError, LedPoseError, derive_seed
from ledpose.pose.model import LedPoseNet, load_checkpoint, multi_scale_forward, multi_scale_loss, save_checkpoint
from ledpose.pose.training.config import TrainConfig
from ledpose.pose.training.data import LedFrameDataset, make_loader
from ledpose.pose.training.schedule import HISTORY_NAME, EpochRecord, TrainHistory, lr_at

logger = logging.getLogger(__name__)

BEST_NAME = "best.pt"
LAST_NAME = "last.pt"

Batch = tuple[Tensor, ...]
LossFn = Callable[[LedPoseNet, Batch, torch.device], Tensor]


@dataclass(slots=True)
class TrainResult:
    """``model`` holds the best-validation parameters, in eval mode."""

    model: LedPoseNet
    history: TrainHistory
    best_path: Path | None = None
    last_path: Path | None = None
    pose_reads: int = 0

    @property
    def best_val_loss(self) -> float:
        return self.history.best_val_loss


def self_supervised_loss(model: LedPoseNet, batch: Batch, device: torch.device) -> Tensor:
    images, labels = batch[0].to(device), batch[1].to(device)
    return multi_scale_loss(multi_scale_forward(model, images), labels).total


@torch.no_grad()
def evaluate_loss(model: LedPoseNet, loader: DataLoader[Batch], loss_fn: LossFn, device: torch.device) -> float:
    """Frame-weighted mean loss over a loader, in eval mode."""
    model.eval()
    total = 0.0
    count = 0
    for batch in loader:
        n = int(batch[0].shape[0])
        total += float(loss_fn(model, batch, device)) * n
        count += n
    if count == 0:
        raise DatasetError("validation set is empty")
    return total / count


def cosine_scheduler(optimizer: torch.optim.Optimizer, cfg: TrainConfig) -> torch.optim.lr_scheduler.LambdaLR:
    """Scale the optimizer's ``lr_initial`` so that epoch ``e`` runs at ``lr_at(e, cfg)``."""
    last = cfg.epochs - 1
    return torch.optim.lr_scheduler.LambdaLR(optimizer, lambda e: lr_at(min(e, last), cfg) / cfg.lr_initial)


def run_epochs(
    model: LedPoseNet,
    train_loader: DataLoader[Batch],
    val_loader: DataLoader[Batch],
    loss_fn: LossFn,
    cfg: TrainConfig,
    out_dir: Path | None = None,
    meta: dict[str, Any] | None = None,
) -> TrainResult:
    """
    Adam on ``loss_fn`` with the cosine schedule, keeping the best-validation parameters.

    Args:
        model: Network to optimize in place
        train_loader: Shuffled training batches; its dataset may expose ``set_epoch``
        val_loader: Validation batches
        loss_fn: Scalar loss for one batch
        cfg: Schedule, device and determinism settings
        out_dir: When given, receives ``best.pt``, ``last.pt`` and ``history.jsonl``
        meta: Extra checkpoint metadata

    Returns:
        TrainResult with the best parameters loaded

    Raises:
        LedPoseError: If the training loss stops being finite
    """
    torch.use_deterministic_algorithms(cfg.deterministic, warn_only=True)
    device = torch.device(cfg.device)
    model.to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.lr_initial)
    scheduler = cosine_scheduler(optimizer, cfg)
    history = TrainHistory()
    best_state: dict[str, Tensor] | None = None
    best_loss = math.inf
    best_path = out_dir / BEST_NAME if out_dir is not None else None
    base_meta = dict(meta or {})

    for epoch in range(cfg.epochs):
        lr = float(optimizer.param_groups[0]["lr"])
        set_epoch = getattr(train_loader.dataset, "set_epoch", None)
        if set_epoch is not None:
            set_epoch(epoch)

        model.train()
        total = 0.0
        count = 0
        for batch in train_loader:
            optimizer.zero_grad(set_to_none=True)
            loss = loss_fn(model, batch, device)
            if not torch.isfinite(loss):
                raise LedPoseError(f"training loss became {float(loss)} at epoch {epoch}")
            loss.backward()
            optimizer.step()
            n = int(batch[0].shape[0])
            total += float(loss.detach()) * n
            count += n
        if count == 0:
            raise DatasetError("training set is empty")
        train_loss = total / count
        val_loss = evaluate_loss(model, val_loader, loss_fn, device)

        history.append(EpochRecord(epoch=epoch, train_loss=train_loss, val_loss=val_loss, lr=lr))
        logger.info("Epoch %d/%d: train %.5f, val %.5f, lr %.2e", epoch + 1, cfg.epochs, train_loss, val_loss, lr)

        if val_loss < best_loss:
            best_loss = val_loss
            best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
            if best_path is not None:
                save_checkpoint(best_path, model, _checkpoint_meta(base_meta, epoch, val_loss, history))
        if out_dir is not None:
            history.write(out_dir / HISTORY_NAME)
        scheduler.step()

    last_path = None
    if out_dir is not None:
        last = history.records[-1]
        last_path = save_checkpoint(
            out_dir / LAST_NAME, model, _checkpoint_meta(base_meta, last.epoch, last.val_loss, history)
        )
    if best_state is not None:
        model.load_state_dict(best_state)
    model.eval()
    logger.info("Best epoch %d with validation loss %.5f", history.best_epoch + 1, history.best_val_loss)
    return TrainResult(model=model, history=history, best_path=best_path, last_path=last_path)


def _checkpoint_meta(base: dict[str, Any], epoch: int, val_loss: float, history: TrainHistory) -> dict[str, Any]:
    return {
        **base,
        "epoch": epoch,
        "val_loss": val_loss,
        "history": [r.model_dump(mode="json") for r in history.records],
    }


def resume_into(model: LedPoseNet, path: Path) -> dict[str, Any]:
    """Load parameters from a checkpoint of the same architecture; returns its metadata."""
    checkpoint = load_checkpoint(path)
    if checkpoint.config != model.cfg:
        raise InvalidInputError(f"checkpoint {path} was trained with a different model configuration")
    model.load_state_dict(checkpoint.state_dict)
    logger.info("Resumed parameters from %s (epoch %s)", path, checkpoint.meta.get("epoch"))
    return checkpoint.meta


def check_labels(manifest: DatasetManifest, model: LedPoseNet) -> None:
    if manifest.led_count != model.cfg.led_count:
        raise DatasetError(
            f"dataset has {manifest.led_count} LED labels per frame, the model predicts {model.cfg.led_count}"
        )


def train(
    model: LedPoseNet,
    train_manifest: DatasetManifest,
    val_manifest: DatasetManifest,
    cfg: TrainConfig,
    out_dir: Path | None = None,
) -> TrainResult:
    """
    Self-supervised training on LED labels alone.

    Poses are never read: both datasets go through pose-refusing accessors, and
    the returned ``pose_reads`` counts any attempt.

    Raises:
        DatasetError: If a manifest is empty or its label length differs from the model's K
    """
    parent = None
    if cfg.resume_from is not None:
        resume_into(model, cfg.resume_from)
        parent = str(cfg.resume_from)
    if cfg.max_samples is not None:
        train_manifest = train_manifest.head(cfg.max_samples)
    check_labels(train_manifest, model)
    check_labels(val_manifest, model)

    train_set = LedFrameDataset.self_supervised(
        train_manifest,
        augment_cfg=cfg.augment,
        seed=derive_seed(cfg.seed, "augment"),
        permute_labels=cfg.permute_labels,
    )
    val_set = LedFrameDataset.self_supervised(val_manifest)
    logger.info(
        "Training on %d frames, validating on %d (%s)",
        len(train_set),
        len(val_set),
        "permuted labels" if cfg.permute_labels else "LED labels",
    )
    result = run_epochs(
        model,
        make_loader(
            train_set,
            batch_size=cfg.batch_size,
            shuffle=True,
            seed=derive_seed(cfg.seed, "loader"),
            num_workers=cfg.num_workers,
        ),
        make_loader(val_set, batch_size=cfg.batch_size, shuffle=False, num_workers=cfg.num_workers),
        self_supervised_loss,
        cfg,
        out_dir,
        meta={"mode": "self_supervised", "seed": cfg.seed, "parent": parent, "train_frames": len(train_set)},
    )
    result.pose_reads = train_set.accessor.pose_reads + val_set.accessor.pose_reads
    return result


__all__ = [
    "BEST_NAME",
    "LAST_NAME",
    "LossFn",
    "TrainResult",
    "check_labels",
    "cosine_scheduler",
    "evaluate_loss",
    "resume_into",
    "run_epochs",
    "self_supervised_loss",
    "train",
]
