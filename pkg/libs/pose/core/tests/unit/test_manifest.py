"""Test manifest persistence, the pose-access guard and run bookkeeping."""

import json
from pathlib import Path

import numpy as np
import pytest

from ledpose.pose.core import (
    DatasetError,
    DatasetManifest,
    ManifestAccessor,
    OutputExistsError,
    PoseAccessError,
    RunRecord,
    SampleRecord,
    derive_seed,
    gradient_noise,
    prepare_output,
    run_lock,
    write_run_record,
)
from ledpose.pose.core.errors import LedPoseError
from ledpose.platform.config import load_config_file


def _records() -> list[SampleRecord]:
    return [
        SampleRecord(frame_id=0, image="images/000000.png", leds=[1, 0, 0, 1], visible=False, split="train"),
        SampleRecord(frame_id=1, image="images/000001.png", leds=[0, 0, 1, 1], visible=True,
                     pose=[1.5, -0.2, 0.3], split="val"),
    ]


def test_record_line_has_exact_field_names():
    line = _records()[1].to_line()
    payload = json.loads(line)
    assert list(payload) == ["frame_id", "image", "leds", "visible", "pose", "split"]
    assert payload["visible"] == 1
    assert payload["pose"] == [1.5, -0.2, 0.3]


def test_record_requires_pose_iff_visible():
    with pytest.raises(ValueError):
        SampleRecord(frame_id=0, image="a.png", leds=[1], visible=True, pose=None)
    with pytest.raises(ValueError):
        SampleRecord(frame_id=0, image="a.png", leds=[1], visible=False, pose=[1.0, 0.0, 0.0])


def test_manifest_write_load_roundtrip(tmp_path: Path):
    manifest = DatasetManifest(tmp_path, _records(), scene={"led_count": 4})
    path = manifest.write()

    loaded = DatasetManifest.load(tmp_path)

    assert path.read_text(encoding="utf-8").count("\n") == 2
    assert [r.model_dump() for r in loaded] == [r.model_dump() for r in manifest]
    assert loaded.scene == {"led_count": 4}
    assert len(loaded.split("val")) == 1
    assert loaded.led_count == 4


def test_manifest_missing_images_detected(tmp_path: Path):
    manifest = DatasetManifest(tmp_path, _records())
    with pytest.raises(DatasetError):
        manifest.check_images()


def test_manifest_load_reports_bad_lines(tmp_path: Path):
    (tmp_path / "manifest.jsonl").write_text('{"frame_id": 0}\n', encoding="utf-8")
    with pytest.raises(DatasetError):
        DatasetManifest.load(tmp_path)


def test_accessor_refuses_and_counts_pose_reads(tmp_path: Path):
    accessor = ManifestAccessor(DatasetManifest(tmp_path, _records()))

    np.testing.assert_array_equal(accessor.leds(1), [0, 0, 1, 1])
    assert accessor.pose_reads == 0
    with pytest.raises(PoseAccessError):
        accessor.pose(1)
    with pytest.raises(PoseAccessError):
        accessor.visible(0)
    assert accessor.pose_reads == 2


def test_accessor_with_pose_access(tmp_path: Path):
    accessor = ManifestAccessor(DatasetManifest(tmp_path, _records()), allow_poses=True)
    pose = accessor.pose(1)
    assert pose is not None and pose.x == 1.5
    assert accessor.pose(0) is None
    assert accessor.poses(1) == [pose]


def test_derive_seed_is_stable_and_stream_specific():
    assert derive_seed(7, "dataset") == derive_seed(7, "dataset")
    assert derive_seed(7, "dataset") != derive_seed(7, "init")
    assert derive_seed(7, "dataset") != derive_seed(8, "dataset")
    assert 0 <= derive_seed(123, "x") < 2**63


def test_gradient_noise_range_and_determinism():
    a = gradient_noise(40, 60, 8.0, np.random.default_rng(0), octaves=3)
    b = gradient_noise(40, 60, 8.0, np.random.default_rng(0), octaves=3)
    assert a.shape == (40, 60)
    assert a.min() >= -1.0 and a.max() <= 1.0
    np.testing.assert_array_equal(a, b)
    # neighbouring pixels stay close: the field is smooth
    assert np.abs(np.diff(gradient_noise(40, 60, 16.0, np.random.default_rng(1)), axis=1)).max() < 0.5


def test_prepare_output_refuses_existing_path(tmp_path: Path):
    out = tmp_path / "run"
    prepare_output(out)
    with pytest.raises(OutputExistsError):
        prepare_output(out)
    (out / "stale.txt").write_text("x", encoding="utf-8")
    prepare_output(out, force=True)
    assert not (out / "stale.txt").exists()


def test_run_lock_is_exclusive(tmp_path: Path):
    with run_lock(tmp_path):
        with pytest.raises(LedPoseError):
            with run_lock(tmp_path):
                pass
    with run_lock(tmp_path):
        pass


def test_write_run_record_digests_outputs(tmp_path: Path):
    (tmp_path / "report.yaml").write_text("gamma: 0.5\n", encoding="utf-8")
    (tmp_path / "images").mkdir()
    (tmp_path / "images" / "a.png").write_bytes(b"png")

    path = write_run_record(tmp_path, RunRecord(command="eval", seed=3))

    data = load_config_file(path)
    assert data["command"] == "eval"
    assert [f["path"] for f in data["files"]] == ["report.yaml"]
    assert len(data["files"][0]["sha256"]) == 64
