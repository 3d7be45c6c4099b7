import pytest
import torch

from ledpose.pose.core import InvalidInputError
from ledpose.pose.inference import extract_robots, localize
from ledpose.pose.model import MultiScaleStack

DT = torch.float64


def logit_stack(logits: torch.Tensor) -> MultiScaleStack:
    """Stack from raw presence logits (B, S, H, W) with neutral bearing and LED maps."""
    b, s, h, w = logits.shape
    presence = torch.softmax(logits.reshape(b, -1), dim=1).reshape(logits.shape)
    bearing = torch.zeros(b, s, 2, h, w, dtype=DT)
    bearing[:, :, 0] = 1.0
    return MultiScaleStack(
        presence_logits=logits,
        presence=presence,
        bearing=bearing,
        led_logits=torch.zeros(b, s, 4, h, w, dtype=DT),
        scale_factors=(1.0, 0.5, 0.25)[:s],
        image_size=(8 * w, 8 * h),
        maps=[],
    )


def peaks(*cells: tuple[int, int, int], shape: tuple[int, int, int] = (3, 6, 12), height: float = 5.0) -> torch.Tensor:
    logits = torch.zeros((1, *shape), dtype=DT)
    for s, r, c in cells:
        logits[0, s, r, c] = height
    return logits


def test_single_peak_gives_one_robot():
    robots = extract_robots(logit_stack(peaks((0, 2, 5))), nms_radius=3)
    assert [(r.row, r.col) for r in robots] == [(2, 5)]


def test_two_separated_peaks_give_two_robots():
    robots = extract_robots(logit_stack(peaks((0, 2, 1), (1, 3, 9))), nms_radius=3)
    assert sorted((r.row, r.col) for r in robots) == [(2, 1), (3, 9)]


def test_close_peaks_are_suppressed():
    robots = extract_robots(logit_stack(peaks((0, 2, 4), (0, 2, 6), height=5.0)), nms_radius=3)
    assert len(robots) == 1


def test_stronger_peak_comes_first_and_max_robots_applies():
    logits = peaks((0, 1, 1))
    logits[0, 0, 4, 10] = 3.0
    robots = extract_robots(logit_stack(logits), nms_radius=2)
    assert [(r.row, r.col) for r in robots] == [(1, 1), (4, 10)]
    assert robots[0].strength > robots[1].strength
    assert len(extract_robots(logit_stack(logits), max_robots=1, nms_radius=2)) == 1


def test_weak_bumps_below_threshold_are_ignored():
    logits = peaks((0, 1, 1))
    logits[0, 0, 4, 10] = 1.0
    robots = extract_robots(logit_stack(logits), nms_radius=2)
    assert [(r.row, r.col) for r in robots] == [(1, 1)]


def test_constant_map_gives_no_robots():
    assert extract_robots(logit_stack(torch.full((1, 3, 6, 12), 0.3, dtype=DT))) == []


def test_windowed_presence_is_normalized_and_local():
    stack = logit_stack(peaks((0, 2, 1), (1, 3, 9)))
    robots = extract_robots(stack, nms_radius=3)
    for robot in robots:
        presence = robot.stack.presence[0]
        assert float(presence.sum()) == pytest.approx(1.0)
        rows = torch.arange(6)[:, None]
        cols = torch.arange(12)[None, :]
        outside = ((rows - robot.row).abs() > 3) | ((cols - robot.col).abs() > 3)
        assert float(presence[:, outside].sum()) == 0.0

    left = next(r for r in robots if r.col == 1)
    u, _ = localize(left.stack)[0].tolist()
    assert u < 6 * 8


def test_window_keeps_full_frame_presence_ratios():
    stack = logit_stack(peaks((0, 2, 1), (1, 3, 9), height=4.0))
    robot = next(r for r in extract_robots(stack, nms_radius=3) if r.col == 1)
    rows = torch.arange(6)[:, None]
    cols = torch.arange(12)[None, :]
    inside = ((rows - 2).abs() <= 3) & ((cols - 1).abs() <= 3)
    expected = stack.presence[0] * inside
    expected = expected / expected.sum()
    assert torch.allclose(robot.stack.presence[0], expected, atol=1e-12)


def test_extract_needs_single_image():
    batch = torch.cat([peaks((0, 1, 1)), peaks((0, 2, 2))])
    with pytest.raises(InvalidInputError):
        extract_robots(logit_stack(batch))
