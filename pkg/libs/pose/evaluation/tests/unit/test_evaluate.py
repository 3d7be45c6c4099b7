import math
from pathlib import Path

import numpy as np
import pytest
import torch

from ledpose.pose.core import CameraIntrinsics, DatasetError, DatasetManifest, Pose2D
from ledpose.pose.evaluation import (
    FrameTruth,
    evaluate,
    evaluate_detection,
    evaluate_multi_robot,
    evaluate_predictor,
    frame_truths,
    match_by_pixel,
    mean_predictor,
)
from ledpose.pose.inference import Calibration, calibrate_from_rf_distance
from ledpose.pose.model import LedPoseNet, ModelConfig, build_model
from ledpose.pose.synth import SceneConfig, generate_dataset

SMALL = ModelConfig(input_width=64, input_height=48, channels=(4, 4, 6, 6, 8, 8))
INTR = CameraIntrinsics.from_fov(64, 48)
TINY = SceneConfig(
    intrinsics=INTR,
    distance_range=(0.8, 3.0),
    visible_fraction=0.5,
    toggle_period=1,
    split_fractions=(0.7, 0.2, 0.1),
)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory: pytest.TempPathFactory) -> DatasetManifest:
    return generate_dataset(TINY, 40, seed=21, out_dir=tmp_path_factory.mktemp("tiny"))


def zero_model() -> LedPoseNet:
    model = build_model(SMALL, seed=0)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model.eval()


def calibration() -> Calibration:
    return calibrate_from_rf_distance(1.2, SMALL, INTR)


def test_zero_model_metrics(dataset: DatasetManifest):
    truths = frame_truths(dataset, INTR)
    report = evaluate(zero_model(), dataset, calibration(), INTR, batch_size=7)

    assert report.n_samples == len(truths) == sum(r.visible for r in dataset.records)
    assert report.e_uv == pytest.approx(float(np.median([math.hypot(t.u - 32, t.v - 24) for t in truths])), abs=1e-6)
    # untrained LED maps: every score ties
    assert report.auc_led in (0.5, None)
    predicted_d = 1.2 * (1.0 + 0.5 + 0.25) / 3
    expected_d = np.mean([abs(t.pose.distance - predicted_d) / t.pose.distance for t in truths])
    assert report.e_d == pytest.approx(float(expected_d), rel=1e-6)
    assert 0.0 <= report.gamma <= 1.0


def test_batch_size_does_not_change_metrics(dataset: DatasetManifest):
    model = zero_model()
    a = evaluate(model, dataset, calibration(), INTR, batch_size=1)
    b = evaluate(model, dataset, calibration(), INTR, batch_size=64)
    assert a.e_uv == pytest.approx(b.e_uv, abs=1e-9)
    assert a.e_d == pytest.approx(b.e_d, abs=1e-9)
    assert a.gamma == b.gamma


def test_leds_off_subset(dataset: DatasetManifest):
    expected = [t for t in frame_truths(dataset, INTR) if t.leds_off]
    if not expected:
        with pytest.raises(DatasetError):
            evaluate(zero_model(), dataset, calibration(), INTR, subset="leds_off")
        return
    report = evaluate(zero_model(), dataset, calibration(), INTR, subset="leds_off")
    assert report.n_samples == len(expected)
    assert report.subset == "leds_off"


def test_mean_predictor_baseline_runs_end_to_end(dataset: DatasetManifest):
    predictor = mean_predictor(dataset.split("train"), INTR)
    report = evaluate_predictor(predictor, dataset, INTR, label="mean")
    assert report.label == "mean"
    assert report.auc_led in (0.5, None)
    assert 0.0 <= report.gamma <= 1.0


def test_untrained_detection_is_at_chance(dataset: DatasetManifest):
    report = evaluate_detection(zero_model(), dataset)
    assert report.auc_max == pytest.approx(0.5)
    assert report.auc_entropy == pytest.approx(0.5)
    assert report.n_visible + report.n_empty == len(dataset)


def test_detection_needs_both_classes(dataset: DatasetManifest):
    with pytest.raises(DatasetError):
        evaluate_detection(zero_model(), dataset.where(lambda r: r.visible))


def test_match_by_pixel_pairs_nearest_overall():
    pose = Pose2D(x=2.0, y=0.0, psi=0.0)
    leds = np.zeros(4, dtype=np.float32)
    seen = np.ones(4, dtype=bool)
    truths = [FrameTruth(0, 10.0, 10.0, pose, leds, seen), FrameTruth(0, 50.0, 10.0, pose, leds, seen)]
    assert sorted(match_by_pixel(truths, [(48.0, 12.0), (11.0, 9.0)])) == [(0, 1), (1, 0)]
    assert match_by_pixel(truths, []) == []
    assert match_by_pixel(truths, [(40.0, 10.0)]) == [(1, 0)]


def test_multi_robot_on_an_untrained_model(dataset: DatasetManifest):
    report = evaluate_multi_robot(zero_model(), dataset, calibration(), INTR)
    empty = sum(not r.visible for r in dataset.records)
    assert report.n_matched == 0
    assert report.e_uv is None
    assert report.count_accuracy == pytest.approx(empty / len(dataset))
    assert report.n_robots == len(dataset) - empty


def test_multi_robot_rejects_empty_manifests(dataset: DatasetManifest, tmp_path: Path):
    with pytest.raises(DatasetError):
        evaluate_multi_robot(zero_model(), DatasetManifest(tmp_path, []), calibration(), INTR)
