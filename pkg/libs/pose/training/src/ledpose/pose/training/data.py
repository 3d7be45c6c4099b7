"""Torch datasets over manifests.

Self-supervised datasets go through a :class:`ManifestAccessor` that refuses
pose reads, so the training loop can only ever see images and LED labels.
"""

from __future__ import annotations

import logging

import numpy as np
import torch
from numpy.typing import NDArray
from torch import Tensor
from torch.utils.data import DataLoader, Dataset

from ledpose.pose.core import DatasetError, DatasetManifest, ManifestAccessor, load_image
from ledpose.pose.training.augment import augment
from ledpose.pose.training.config import AugmentConfig

logger = logging.getLogger(__name__)


def label_permutation(n: int, seed: int) -> NDArray[np.int64]:
    """Fixed shuffle of label rows across frames, used by the null control."""
    return np.random.default_rng(seed).permutation(n)


class LedFrameDataset(Dataset[tuple[Tensor, Tensor]]):
    """(image, LED labels) pairs; images are (3, H, W) float32 in [0, 1]."""

    def __init__(
        self,
        accessor: ManifestAccessor,
        *,
        augment_cfg: AugmentConfig | None = None,
        seed: int = 0,
        permutation: NDArray[np.int64] | None = None,
    ):
        if len(accessor) == 0:
            raise DatasetError("dataset has no frames")
        if permutation is not None and sorted(permutation.tolist()) != list(range(len(accessor))):
            raise DatasetError("label permutation does not match the dataset size")
        self.accessor = accessor
        self.augment_cfg = augment_cfg
        self.seed = seed
        self.permutation = permutation
        self.epoch = 0

    @classmethod
    def self_supervised(
        cls,
        manifest: DatasetManifest,
        *,
        augment_cfg: AugmentConfig | None = None,
        seed: int = 0,
        permute_labels: bool = False,
    ) -> LedFrameDataset:
        accessor = ManifestAccessor(manifest, allow_poses=False)
        permutation = label_permutation(len(accessor), seed) if permute_labels and len(accessor) else None
        return cls(accessor, augment_cfg=augment_cfg, seed=seed, permutation=permutation)

    def set_epoch(self, epoch: int) -> None:
        """Select the augmentation substream; frame i of epoch e always gets the same noise."""
        self.epoch = epoch

    def __len__(self) -> int:
        return len(self.accessor)

    def load(self, index: int) -> NDArray[np.float32]:
        image = load_image(self.accessor.image_path(index))
        if self.augment_cfg is not None and self.augment_cfg.enabled:
            rng = np.random.default_rng([self.seed, self.epoch, self.accessor.frame_id(index)])
            image = augment(image, rng, self.augment_cfg)
        return image

    def labels(self, index: int) -> NDArray[np.float32]:
        source = int(self.permutation[index]) if self.permutation is not None else index
        return self.accessor.leds(source)

    def __getitem__(self, index: int) -> tuple[Tensor, Tensor]:
        image = self.load(index)
        return (
            torch.from_numpy(np.ascontiguousarray(image.transpose(2, 0, 1))),
            torch.from_numpy(self.labels(index)),
        )


def make_loader(
    dataset: Dataset[tuple[Tensor, ...]],
    *,
    batch_size: int,
    shuffle: bool,
    seed: int = 0,
    num_workers: int = 0,
) -> DataLoader[tuple[Tensor, ...]]:
    generator = torch.Generator().manual_seed(seed)
    return DataLoader(
        dataset,
        batch_size=batch_size,
        shuffle=shuffle,
        num_workers=num_workers,
        generator=generator,
        drop_last=False,
    )


__all__ = ["LedFrameDataset", "label_permutation", "make_loader"]
