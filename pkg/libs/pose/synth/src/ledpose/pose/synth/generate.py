"""Dataset generation: frame planning (labels, poses, splits) and rendering to disk."""

from __future__ import annotations

import logging
import math
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ledpose.pose.core import (
    DatasetError,
    DatasetManifest,
    InvalidInputError,
    LedStateVector,
    Pose2D,
    SampleRecord,
    save_image,
)
from ledpose.pose.core.manifest import SplitTag
from ledpose.pose.synth.render import Sample, render_frame, render_multi_frame
from ledpose.pose.synth.scene import SceneConfig

logger = logging.getLogger(__name__)

IMAGES_DIR = "images"
_MAX_PLACEMENT_ATTEMPTS = 1000


@dataclass(slots=True, frozen=True)
class FramePlan:
    """Labels and poses of one frame, decided before any pixel is drawn."""

    frame_id: int
    leds: tuple[int, ...]
    split: SplitTag
    poses: tuple[Pose2D, ...] = ()

    @property
    def visible(self) -> bool:
        return bool(self.poses)

    @property
    def pose(self) -> Pose2D | None:
        return self.poses[0] if self.poses else None


def _pose_at_column(scene: SceneConfig, u: float, distance: float, psi: float) -> Pose2D:
    intr = scene.intrinsics
    alpha = math.atan((u - intr.cx) / intr.fx)
    return Pose2D(x=distance * math.cos(alpha), y=distance * math.sin(alpha), psi=psi)


def sample_pose(scene: SceneConfig, rng: np.random.Generator, *, boundary: bool = False) -> Pose2D:
    """Uniform distance and bearing; the image column keeps the body in frame unless ``boundary``.

    Boundary poses keep the center inside the image but let the frame edge cut the body.
    """
    near, far = scene.distance_range
    distance = float(rng.uniform(near, far))
    side = scene.apparent_size(distance)
    width = scene.width
    if boundary:
        offset = float(rng.uniform(0.0, min(side / 2.0, width / 2.0)))
        u = offset if rng.random() < 0.5 else width - offset
    else:
        lo, hi = side / 2.0, width - side / 2.0
        u = float(rng.uniform(lo, hi)) if lo < hi else width / 2.0
    return _pose_at_column(scene, u, distance, float(rng.uniform(-math.pi, math.pi)))


def sample_separated_poses(
    scene: SceneConfig,
    rng: np.random.Generator,
    count: int,
    min_separation: float,
) -> tuple[Pose2D, ...]:
    """``count`` fully visible poses whose silhouettes are at least ``min_separation`` pixels apart."""
    for _ in range(_MAX_PLACEMENT_ATTEMPTS):
        poses = [sample_pose(scene, rng) for _ in range(count)]
        columns = [scene.intrinsics.cx + scene.intrinsics.fx * p.y / p.x for p in poses]
        sides = [scene.apparent_size(p.distance) for p in poses]
        if all(
            abs(columns[i] - columns[j]) > (sides[i] + sides[j]) / 2.0 + min_separation
            for i in range(count)
            for j in range(i + 1, count)
        ):
            return tuple(poses)
    raise DatasetError(
        f"could not place {count} robots {min_separation:.0f} px apart in a {scene.width} px wide image; "
        "narrow the distance range or lower the separation"
    )


def _split_tags(n_frames: int, fractions: tuple[float, float, float]) -> list[SplitTag]:
    n_train = int(round(n_frames * fractions[0]))
    n_val = min(int(round(n_frames * fractions[1])), n_frames - n_train)
    n_test = n_frames - n_train - n_val
    return ["train"] * n_train + ["val"] * n_val + ["test"] * n_test


def plan_frames(
    scene: SceneConfig,
    n_frames: int,
    seed: int,
    *,
    robots: int = 1,
    min_separation: float = 70.0,
) -> list[FramePlan]:
    """
    Decide labels, poses and splits for ``n_frames`` frames.

    Exactly ``round(n_frames * visible_fraction)`` frames get a robot. Each LED
    holds its state for ``toggle_period`` frames and is then resampled
    independently of the others. Splits are assigned sequentially.
    """
    if n_frames <= 0:
        raise InvalidInputError(f"n_frames must be positive, got {n_frames}")
    if robots < 1:
        raise InvalidInputError(f"robots must be at least 1, got {robots}")
    if seed < 0:
        raise InvalidInputError("seed must be non-negative")
    rng = np.random.default_rng(seed)
    count = scene.led_config.count

    visible = np.zeros(n_frames, dtype=bool)
    visible[rng.choice(n_frames, size=int(round(n_frames * scene.visible_fraction)), replace=False)] = True

    blocks = math.ceil(n_frames / scene.toggle_period)
    held = rng.random((blocks, count)) < scene.led_on_probability
    leds = np.repeat(held, scene.toggle_period, axis=0)[:n_frames].astype(int)

    splits = _split_tags(n_frames, scene.split_fractions)
    plans: list[FramePlan] = []
    for frame_id in range(n_frames):
        poses: tuple[Pose2D, ...] = ()
        if visible[frame_id]:
            if robots > 1:
                poses = sample_separated_poses(scene, rng, robots, min_separation)
            else:
                boundary = bool(rng.random() < scene.boundary_fraction)
                poses = (sample_pose(scene, rng, boundary=boundary),)
        plans.append(FramePlan(frame_id, tuple(int(b) for b in leds[frame_id]), splits[frame_id], poses))
    return plans


def frame_rng(seed: int, frame_id: int) -> np.random.Generator:
    """Per-frame substream, independent of rendering order."""
    return np.random.default_rng([seed, frame_id])


def render_plan(scene: SceneConfig, plan: FramePlan, seed: int) -> Sample:
    rng = frame_rng(seed, plan.frame_id)
    leds = LedStateVector.from_bits(plan.leds)
    if len(plan.poses) > 1:
        return render_multi_frame(scene, plan.poses, leds, rng, frame_id=plan.frame_id)
    return render_frame(scene, plan.pose, leds, rng, frame_id=plan.frame_id)


def generate_dataset(
    scene: SceneConfig,
    n_frames: int,
    seed: int,
    out_dir: Path,
    *,
    robots: int = 1,
    min_separation: float = 70.0,
    workers: int = 0,
) -> DatasetManifest:
    """
    Plan, render and write a dataset into ``out_dir``.

    Writes ``images/NNNNNN.png``, ``manifest.jsonl`` and ``scene.yaml``. The
    result is byte-identical for the same scene, frame count and seed,
    regardless of ``workers``.

    Raises:
        DatasetError: If ``out_dir`` cannot be written
    """
    plans = plan_frames(scene, n_frames, seed, robots=robots, min_separation=min_separation)
    try:
        (out_dir / IMAGES_DIR).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DatasetError(f"cannot write dataset to {out_dir}: {e}") from e

    def produce(plan: FramePlan) -> SampleRecord:
        sample = render_plan(scene, plan, seed)
        rel = f"{IMAGES_DIR}/{plan.frame_id:06d}.png"
        try:
            save_image(out_dir / rel, sample.image)
        except OSError as e:
            raise DatasetError(f"cannot write {out_dir / rel}: {e}") from e
        return SampleRecord(
            frame_id=plan.frame_id,
            image=rel,
            leds=sample.led_states.as_bits(),
            visible=sample.visible,
            pose=sample.gt_pose.as_list() if sample.gt_pose is not None else None,
            split=plan.split,
            poses=[p.as_list() for p in sample.poses] if robots > 1 and sample.visible else None,
        )

    records: Iterator[SampleRecord]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = iter(list(pool.map(produce, plans)))
    else:
        records = map(produce, plans)

    manifest = DatasetManifest(out_dir, list(records), scene=scene.model_dump(mode="json"))
    manifest.write()
    n_visible = sum(1 for r in manifest if r.visible)
    logger.info("Generated %d frames (%d visible) in %s", len(manifest), n_visible, out_dir)
    return manifest


__all__ = [
    "IMAGES_DIR",
    "FramePlan",
    "frame_rng",
    "generate_dataset",
    "plan_frames",
    "render_plan",
    "sample_pose",
    "sample_separated_poses",
]
