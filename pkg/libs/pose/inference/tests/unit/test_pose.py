import math

import numpy as np
import pytest
import torch

from ledpose.pose.core import CalibrationError, CameraIntrinsics, InvalidInputError
from ledpose.pose.inference import (
    Calibration,
    PoseEstimate,
    calibrate_from_rf_distance,
    estimate_multi_pose,
    estimate_pose,
    estimate_poses,
)
from ledpose.pose.model import LedPoseNet, ModelConfig, build_model

SMALL = ModelConfig(input_width=64, input_height=48, channels=(4, 4, 6, 6, 8, 8))
INTR = CameraIntrinsics.from_fov(64, 48)


def zero_model(cfg: ModelConfig) -> LedPoseNet:
    model = LedPoseNet(cfg)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model.eval()


def frame(seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).random((48, 64, 3)).astype(np.float32)


def test_untrained_model_reads_image_center_with_no_confidence():
    cal = calibrate_from_rf_distance(2.0, SMALL, INTR)
    estimate = estimate_pose(zero_model(SMALL), frame(), cal, INTR)

    assert (estimate.u, estimate.v) == pytest.approx((32.0, 24.0), abs=1e-4)
    assert estimate.confidence == pytest.approx(0.0, abs=1e-6)
    assert estimate.presence_score == pytest.approx(0.0, abs=1e-4)
    assert estimate.led_probs == pytest.approx([0.5] * 4)
    assert estimate.psi == pytest.approx(0.0)
    assert estimate.bearing_reliable
    assert estimate.d == pytest.approx(2.0 * (1.0 + 0.5 + 0.25) / 3, rel=1e-5)


def test_pose_back_projects_the_estimate():
    cal = calibrate_from_rf_distance(2.0, SMALL, INTR)
    estimate = estimate_pose(zero_model(SMALL), frame(), cal, INTR)
    pose = estimate.pose(INTR)
    assert pose is not None
    # a robot at the principal point lies straight ahead
    assert pose.x == pytest.approx(estimate.d, rel=1e-4)
    assert pose.y == pytest.approx(0.0, abs=1e-4)
    assert pose.psi == pytest.approx(estimate.psi)


def test_without_calibration_distance_is_missing():
    estimate = estimate_pose(zero_model(SMALL), frame(), None)
    assert estimate.d is None
    assert estimate.pose(INTR) is None
    assert estimate.d_relative > 0


def test_identical_images_give_identical_estimates():
    model = build_model(SMALL, seed=4)
    cal = calibrate_from_rf_distance(1.0, SMALL)
    image = frame(2)
    assert estimate_pose(model, image, cal) == estimate_pose(model, image.copy(), cal)


def test_batched_estimates_match_single_images():
    model = build_model(SMALL, seed=4)
    cal = calibrate_from_rf_distance(1.0, SMALL)
    images = [frame(i) for i in range(3)]
    batch = torch.stack([torch.from_numpy(im.transpose(2, 0, 1).copy()) for im in images])

    batched = estimate_poses(model, batch, cal)
    single = [estimate_pose(model, im, cal) for im in images]

    assert len(batched) == 3
    for a, b in zip(batched, single, strict=True):
        assert a.u == pytest.approx(b.u, abs=1e-4)
        assert a.d == pytest.approx(b.d, rel=1e-4)
        assert math.isclose(math.cos(a.psi - b.psi), 1.0, abs_tol=1e-6)


def test_estimate_stays_inside_the_image():
    model = build_model(SMALL, seed=9)
    for seed in range(5):
        est = estimate_pose(model, frame(seed), calibrate_from_rf_distance(1.0, SMALL))
        assert 0 <= est.u <= 64
        assert 0 <= est.v <= 48
        assert est.d is not None and est.d > 0
        assert all(0 <= p <= 1 for p in est.led_probs)


def test_intrinsics_must_match_the_model():
    with pytest.raises(InvalidInputError):
        estimate_pose(zero_model(SMALL), frame(), None, CameraIntrinsics.from_fov(320, 176))


def test_calibration_for_other_scales_is_rejected():
    cal = Calibration(scale_factors=(1.0, 0.5), d_c=1.0, receptive_field=70)
    with pytest.raises(CalibrationError):
        estimate_pose(zero_model(SMALL), frame(), cal)


def test_multi_pose_on_untrained_model_finds_nobody():
    assert estimate_multi_pose(zero_model(SMALL), frame(), None) == []


def test_estimate_record_is_json_ready():
    estimate = estimate_pose(zero_model(SMALL), frame(), None)
    record = estimate.record()
    assert set(record) >= {"u", "v", "psi", "d", "led_probs", "presence_score", "confidence"}
    assert PoseEstimate.model_validate(record) == estimate
