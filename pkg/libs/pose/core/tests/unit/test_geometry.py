"""Test angle arithmetic, back-projection and the pose accuracy metric."""

import math

import numpy as np
import pytest

from ledpose.pose.core import (
    CameraIntrinsics,
    InvalidInputError,
    LedConfiguration,
    LedStateVector,
    Pose2D,
    back_project,
    circular_error,
    circular_mean,
    pose_accuracy_gamma,
    project_pose,
    wrap_angle,
    wrap_angle_array,
)

INTR = CameraIntrinsics(fx=400.0, fy=400.0, cx=320.0, cy=180.0, width=640, height=360)


def test_wrap_angle_examples():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-3.5 * math.pi) == pytest.approx(0.5 * math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)


def test_wrap_angle_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        wrap_angle(float("nan"))
    with pytest.raises(InvalidInputError):
        wrap_angle(float("inf"))


def test_wrap_angle_is_idempotent_and_in_range():
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-50, 50, size=500):
        w = wrap_angle(float(theta))
        assert -math.pi < w <= math.pi
        assert wrap_angle(w) == pytest.approx(w, abs=1e-12)
        assert math.cos(w) == pytest.approx(math.cos(theta), abs=1e-9)
        assert math.sin(w) == pytest.approx(math.sin(theta), abs=1e-9)


def test_wrap_angle_array_matches_scalar():
    thetas = np.linspace(-20, 20, 101)
    expected = [wrap_angle(float(t)) for t in thetas]
    np.testing.assert_allclose(wrap_angle_array(thetas), expected, atol=1e-12)


def test_circular_error_examples():
    assert circular_error(0.0, 0.0) == 0.0
    assert circular_error(3.1, -3.1) == pytest.approx(2 * math.pi - 6.2, abs=1e-12)
    assert circular_error(math.pi / 2, -math.pi / 2) == pytest.approx(math.pi)


def test_circular_error_symmetric_and_periodic():
    rng = np.random.default_rng(1)
    for a, b in rng.uniform(-10, 10, size=(200, 2)):
        e = circular_error(float(a), float(b))
        assert e == pytest.approx(circular_error(float(b), float(a)), abs=1e-12)
        assert 0.0 <= e <= math.pi
        assert circular_error(float(a), float(a) + 2 * math.pi * 3) == pytest.approx(0.0, abs=1e-9)


def test_circular_mean_wraps_around():
    assert circular_mean([math.pi - 0.1, -math.pi + 0.1]) == pytest.approx(math.pi, abs=1e-12)
    assert circular_mean([0.3, 0.3, 0.3]) == pytest.approx(0.3)


def test_pose_wraps_psi():
    assert Pose2D(x=1.0, y=0.0, psi=3 * math.pi).psi == pytest.approx(math.pi)


def test_back_project_principal_point():
    pose = back_project(INTR, 320.0, 180.0, 2.0, 0.0)
    assert pose.x == pytest.approx(2.0)
    assert pose.y == pytest.approx(0.0)
    assert pose.psi == 0.0


def test_back_project_diagonal_ray_is_right_positive():
    wide = CameraIntrinsics(fx=100.0, fy=100.0, cx=100.0, cy=50.0, width=400, height=100)
    pose = back_project(wide, 200.0, 50.0, math.sqrt(2.0), 0.0)
    assert pose.x == pytest.approx(1.0)
    assert pose.y == pytest.approx(1.0)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_back_project_rejects_non_positive_distance(d: float):
    with pytest.raises(InvalidInputError):
        back_project(INTR, 320.0, 180.0, d, 0.0)


def test_back_project_rejects_pixels_outside_image():
    with pytest.raises(InvalidInputError):
        back_project(INTR, 700.0, 180.0, 1.0, 0.0)


def test_back_project_planar_norm_bounded_by_distance():
    rng = np.random.default_rng(2)
    for u, v, d in zip(rng.uniform(0, 640, 100), rng.uniform(0, 360, 100), rng.uniform(0.1, 5, 100)):
        pose = back_project(INTR, float(u), float(v), float(d), 0.0)
        assert pose.distance <= d + 1e-12
    assert back_project(INTR, 10.0, 180.0, 3.0, 0.0).distance == pytest.approx(3.0)


def test_project_pose_inverts_back_project_on_horizontal_rays():
    pose = back_project(INTR, 500.0, 180.0, 2.5, 0.4)
    u, v = project_pose(INTR, pose)
    assert u == pytest.approx(500.0)
    assert v == pytest.approx(180.0)


def test_gamma_examples():
    deg = math.radians
    assert pose_accuracy_gamma([(0.5, deg(30))], 1.0, deg(45)) == 1.0
    assert pose_accuracy_gamma([(1.2, deg(10))], 1.0, deg(45)) == 0.0
    errors = [(0.5, deg(30)), (0.9, deg(50)), (2.0, deg(5)), (0.1, deg(1))]
    assert pose_accuracy_gamma(errors, 1.0, deg(45)) == 0.5


def test_gamma_rejects_empty_and_bad_thresholds():
    with pytest.raises(InvalidInputError):
        pose_accuracy_gamma([], 1.0, 1.0)
    with pytest.raises(InvalidInputError):
        pose_accuracy_gamma([(0.1, 0.1)], 0.0, 1.0)


def test_gamma_monotone_in_thresholds():
    rng = np.random.default_rng(3)
    errors = [(float(p), float(a)) for p, a in zip(rng.uniform(0, 3, 200), rng.uniform(0, math.pi, 200))]
    previous = 0.0
    for t in np.linspace(0.1, 3.0, 15):
        g = pose_accuracy_gamma(errors, float(t), 1.0)
        assert g >= previous
        previous = g
    previous = 0.0
    for t in np.linspace(0.1, math.pi, 15):
        g = pose_accuracy_gamma(errors, 1.0, float(t))
        assert g >= previous
        previous = g


def test_intrinsics_validation():
    with pytest.raises(ValueError):
        CameraIntrinsics(fx=0.0, fy=1.0, cx=1.0, cy=1.0, width=4, height=4)
    with pytest.raises(ValueError):
        CameraIntrinsics(fx=1.0, fy=1.0, cx=4.0, cy=1.0, width=4, height=4)


def test_led_configuration_mount_bearings():
    bearings = LedConfiguration(count=4).mount_bearings
    np.testing.assert_allclose(bearings, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
    assert np.all(np.diff(bearings) > 0)


def test_led_state_vector_length_checked():
    with pytest.raises(InvalidInputError):
        LedStateVector.from_bits([1, 0]).validate_for(LedConfiguration(count=4))
