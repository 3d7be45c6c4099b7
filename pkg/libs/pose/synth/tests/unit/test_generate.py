import math
from pathlib import Path

import numpy as np
import pytest

from ledpose.pose.core import CameraIntrinsics, DatasetManifest, InvalidInputError
from ledpose.pose.synth import SceneConfig, generate_dataset, plan_frames

TINY = SceneConfig(intrinsics=CameraIntrinsics.from_fov(64, 48), distance_range=(0.8, 3.0))


def test_visible_fraction_is_exact():
    plans = plan_frames(SceneConfig(), 1000, seed=1)
    n_visible = sum(p.visible for p in plans)
    assert n_visible == 230
    assert all((p.pose is not None) == p.visible for p in plans)


def test_plan_is_deterministic():
    a = plan_frames(SceneConfig(), 300, seed=4)
    b = plan_frames(SceneConfig(), 300, seed=4)
    c = plan_frames(SceneConfig(), 300, seed=5)
    assert a == b
    assert a != c


def test_led_states_only_change_on_period_boundaries():
    scene = SceneConfig(toggle_period=10)
    leds = np.array([p.leds for p in plan_frames(scene, 100, seed=2)])

    changes = np.nonzero(np.any(leds[1:] != leds[:-1], axis=1))[0] + 1
    assert all(c % 10 == 0 for c in changes)
    for k in range(leds.shape[1]):
        runs = 1 + int(np.count_nonzero(leds[1:, k] != leds[:-1, k]))
        assert runs <= math.ceil(100 / 10)


def test_led_states_are_independent_across_leds():
    leds = np.array([p.leds for p in plan_frames(SceneConfig(toggle_period=1), 10_000, seed=3)], dtype=float)
    corr = np.corrcoef(leds.T)
    off_diagonal = corr[~np.eye(leds.shape[1], dtype=bool)]
    assert np.abs(off_diagonal).max() < 0.1
    assert 0.45 < leds.mean() < 0.55


def test_splits_are_sequential():
    plans = plan_frames(SceneConfig(), 1000, seed=0)
    tags = [p.split for p in plans]
    assert tags.count("train") == 885
    assert tags.count("val") == 76
    assert tags.count("test") == 39
    assert tags == sorted(tags, key=["train", "val", "test"].index)


def test_poses_stay_in_range_and_in_frame():
    scene = SceneConfig(boundary_fraction=0.0)
    for plan in plan_frames(scene, 400, seed=6):
        if plan.pose is None:
            continue
        assert scene.distance_range[0] <= plan.pose.distance <= scene.distance_range[1]
        u = scene.intrinsics.cx + scene.intrinsics.fx * plan.pose.y / plan.pose.x
        half = scene.apparent_size(plan.pose.distance) / 2
        assert half - 1e-6 <= u <= scene.width - half + 1e-6


def test_boundary_poses_touch_an_edge():
    scene = SceneConfig(boundary_fraction=1.0)
    for plan in plan_frames(scene, 200, seed=6):
        if plan.pose is None:
            continue
        u = scene.intrinsics.cx + scene.intrinsics.fx * plan.pose.y / plan.pose.x
        half = scene.apparent_size(plan.pose.distance) / 2
        assert 0.0 <= u <= scene.width
        assert u <= half + 1e-6 or u >= scene.width - half - 1e-6


def test_two_robot_plans_are_separated():
    scene = SceneConfig(distance_range=(1.5, 4.0))
    for plan in plan_frames(scene, 100, seed=8, robots=2, min_separation=70.0):
        if not plan.visible:
            continue
        a, b = plan.poses
        ua = scene.intrinsics.fx * a.y / a.x
        ub = scene.intrinsics.fx * b.y / b.x
        assert abs(ua - ub) > (scene.apparent_size(a.distance) + scene.apparent_size(b.distance)) / 2 + 70.0


def test_non_positive_frame_count_rejected():
    with pytest.raises(InvalidInputError):
        plan_frames(SceneConfig(), 0, seed=0)


def test_generate_writes_manifest_images_and_scene(tmp_path: Path):
    manifest = generate_dataset(TINY, 20, seed=7, out_dir=tmp_path / "ds")

    loaded = DatasetManifest.load(tmp_path / "ds")
    loaded.check_images()
    assert len(loaded) == 20
    assert SceneConfig.model_validate(loaded.scene) == TINY
    assert [r.model_dump() for r in loaded] == [r.model_dump() for r in manifest]
    assert sum(r.visible for r in loaded) == round(20 * TINY.visible_fraction)


def test_same_seed_gives_byte_identical_datasets(tmp_path: Path):
    generate_dataset(TINY, 12, seed=7, out_dir=tmp_path / "a")
    generate_dataset(TINY, 12, seed=7, out_dir=tmp_path / "b", workers=3)

    a_manifest = (tmp_path / "a" / "manifest.jsonl").read_bytes()
    assert a_manifest == (tmp_path / "b" / "manifest.jsonl").read_bytes()
    for image in sorted((tmp_path / "a" / "images").iterdir()):
        assert image.read_bytes() == (tmp_path / "b" / "images" / image.name).read_bytes()


def test_two_robot_dataset_records_every_pose(tmp_path: Path):
    scene = SceneConfig(distance_range=(1.5, 4.0), visible_fraction=1.0)
    manifest = generate_dataset(scene, 4, seed=1, out_dir=tmp_path / "multi", robots=2)
    for record in manifest:
        assert record.visible
        assert record.poses is not None and len(record.poses) == 2
        assert record.pose == record.poses[0]


def test_rf_distance_matches_pinhole_size():
    scene = SceneConfig()
    d_rf = scene.rf_distance(70)
    assert scene.apparent_size(d_rf) == pytest.approx(70.0)
