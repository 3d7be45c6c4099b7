"""Dataset manifests: line-delimited frame records plus the pose-access guard."""

from __future__ import annotations

import json
import logging
from collections.abc import Iterator, Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field, ValidationError, model_validator

from ledpose.platform.config import dump_config_file, load_config_file
from ledpose.pose.core.errors import DatasetError, PoseAccessError
from ledpose.pose.core.geometry import Pose2D

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
SCENE_NAME = "scene.yaml"

SplitTag = Literal["train", "val", "test"]


class SampleRecord(BaseModel):
    """One frame of a dataset as persisted in ``manifest.jsonl``."""

    frame_id: int = Field(ge=0)
    image: str = Field(description="image path relative to the dataset directory")
    leds: list[int]
    visible: bool
    pose: list[float] | None = None
    split: SplitTag = "train"
    poses: list[list[float]] | None = Field(default=None, description="every robot in composited frames")

    @model_validator(mode="after")
    def _pose_iff_visible(self) -> SampleRecord:
        if self.visible != (self.pose is not None):
            raise ValueError(f"frame {self.frame_id}: pose must be present iff the robot is visible")
        if self.pose is not None and len(self.pose) != 3:
            raise ValueError(f"frame {self.frame_id}: pose must be [x, y, psi]")
        if any(b not in (0, 1) for b in self.leds):
            raise ValueError(f"frame {self.frame_id}: LED states must be 0 or 1")
        return self

    def to_line(self) -> str:
        payload: dict[str, Any] = {
            "frame_id": self.frame_id,
            "image": self.image,
            "leds": list(self.leds),
            "visible": int(self.visible),
            "pose": self.pose,
            "split": self.split,
        }
        if self.poses is not None:
            payload["poses"] = self.poses
        return json.dumps(payload, separators=(", ", ": "))


class DatasetManifest:
    """Ordered frame records of one dataset directory, with its scene description."""

    def __init__(self, root: Path, records: Sequence[SampleRecord], scene: dict[str, Any] | None = None):
        self.root = Path(root)
        self.records: list[SampleRecord] = list(records)
        self.scene: dict[str, Any] = dict(scene or {})

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SampleRecord]:
        return iter(self.records)

    @property
    def led_count(self) -> int:
        if not self.records:
            raise DatasetError(f"manifest at {self.root} is empty")
        return len(self.records[0].leds)

    def image_path(self, record: SampleRecord) -> Path:
        return self.root / record.image

    def split(self, tag: SplitTag) -> DatasetManifest:
        return DatasetManifest(self.root, [r for r in self.records if r.split == tag], self.scene)

    def head(self, n: int) -> DatasetManifest:
        return DatasetManifest(self.root, self.records[:n], self.scene)

    def where(self, predicate: Any) -> DatasetManifest:
        return DatasetManifest(self.root, [r for r in self.records if predicate(r)], self.scene)

    def check_images(self) -> None:
        missing = [r.image for r in self.records if not self.image_path(r).is_file()]
        if missing:
            raise DatasetError(f"{len(missing)} image(s) referenced by the manifest are missing, e.g. {missing[0]}")

    def write(self, root: Path | None = None) -> Path:
        """Write ``manifest.jsonl`` (and ``scene.yaml``) into ``root`` and return the manifest path."""
        target = Path(root) if root is not None else self.root
        target.mkdir(parents=True, exist_ok=True)
        path = target / MANIFEST_NAME
        tmp = path.with_name(f".{path.name}.tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as f:
            for record in self.records:
                f.write(record.to_line())
                f.write("\n")
        tmp.replace(path)
        if self.scene:
            dump_config_file(target / SCENE_NAME, self.scene)
        return path

    @classmethod
    def load(cls, path: str | Path) -> DatasetManifest:
        """Load from a dataset directory or a ``manifest.jsonl`` path."""
        p = Path(path)
        if p.is_dir():
            p = p / MANIFEST_NAME
        if not p.is_file():
            raise DatasetError(f"manifest not found: {p}")
        records: list[SampleRecord] = []
        with open(p, encoding="utf-8") as f:
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    records.append(SampleRecord.model_validate_json(line))
                except ValidationError as e:
                    raise DatasetError(f"{p}:{lineno}: invalid record: {e}") from e
        scene_path = p.parent / SCENE_NAME
        scene = load_config_file(scene_path) if scene_path.is_file() else {}
        logger.info("Loaded %d records from %s", len(records), p)
        return cls(p.parent, records, scene)


class ManifestAccessor:
    """Index-based access to a manifest that gates ground-truth reads.

    Self-supervised consumers get ``allow_poses=False``: they may read images
    and LED labels only. Every pose or visibility request is counted, and
    refused unless poses are allowed.
    """

    def __init__(self, manifest: DatasetManifest, *, allow_poses: bool = False):
        self.manifest = manifest
        self.allow_poses = allow_poses
        self.pose_reads = 0

    def __len__(self) -> int:
        return len(self.manifest)

    def frame_id(self, index: int) -> int:
        return self.manifest.records[index].frame_id

    def image_path(self, index: int) -> Path:
        return self.manifest.image_path(self.manifest.records[index])

    def leds(self, index: int) -> NDArray[np.float32]:
        return np.asarray(self.manifest.records[index].leds, dtype=np.float32)

    def _guard(self) -> None:
        self.pose_reads += 1
        if not self.allow_poses:
            raise PoseAccessError("ground-truth poses are not available to this consumer")

    def visible(self, index: int) -> bool:
        self._guard()
        return self.manifest.records[index].visible

    def pose(self, index: int) -> Pose2D | None:
        self._guard()
        values = self.manifest.records[index].pose
        return Pose2D.from_list(values) if values is not None else None

    def poses(self, index: int) -> list[Pose2D]:
        self._guard()
        record = self.manifest.records[index]
        if record.poses is not None:
            return [Pose2D.from_list(p) for p in record.poses]
        return [Pose2D.from_list(record.pose)] if record.pose is not None else []
