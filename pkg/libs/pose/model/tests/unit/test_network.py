import math

import pytest
import torch
from pydantic import ValidationError

from ledpose.pose.core import InvalidInputError
from ledpose.pose.model import (
    LedPoseNet,
    ModelConfig,
    MultiScaleStack,
    OutputMaps,
    build_model,
    count_parameters,
    forward,
    multi_scale_forward,
    receptive_field,
)

SMALL = ModelConfig(input_width=64, input_height=48, channels=(4, 4, 6, 6, 8, 8))


def zero_model(cfg: ModelConfig) -> LedPoseNet:
    model = LedPoseNet(cfg)
    with torch.no_grad():
        for p in model.parameters():
            p.zero_()
    return model.eval()


def test_full_preset_shape():
    cfg = ModelConfig.full()
    model = build_model(cfg, seed=0).eval()

    with torch.no_grad():
        maps = forward(model, torch.rand(1, 3, 360, 640))

    assert maps.grid == (45, 80)
    assert count_parameters(model) == 178_175
    assert receptive_field(cfg) == 70


def test_full_scale_grids():
    cfg = ModelConfig.full()
    assert [cfg.grid_shape(s) for s in cfg.scale_factors] == [(80, 45), (40, 22), (20, 11)]


def test_desk_preset_grid():
    cfg = ModelConfig.desk()
    assert cfg.grid_shape(1.0) == (40, 22)
    assert [cfg.grid_shape(s) for s in cfg.scale_factors] == [(40, 22), (20, 11), (10, 5)]
    assert receptive_field(cfg) == 70


def test_head_has_presence_bearing_and_led_channels():
    model = build_model(SMALL, seed=0)
    assert model.head.out_channels == 1 + 2 + SMALL.led_count


def test_build_is_deterministic_per_seed():
    a = build_model(SMALL, seed=3).state_dict()
    b = build_model(SMALL, seed=3).state_dict()
    c = build_model(SMALL, seed=4).state_dict()
    assert all(torch.equal(a[k], b[k]) for k in a)
    assert not all(torch.equal(a[k], c[k]) for k in a)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"input_width": 100, "input_height": 48},
        {"scale_factors": (1.0, 0.25, 0.5)},
        {"scale_factors": (0.5, 0.25)},
        {"scale_factors": (1.0, 0.3)},
        {"input_width": 16, "input_height": 8},
    ],
)
def test_invalid_configs_rejected(kwargs: dict[str, object]):
    base: dict[str, object] = {"input_width": 64, "input_height": 48}
    with pytest.raises(ValidationError):
        ModelConfig.model_validate(base | kwargs)


def test_zero_parameters_give_half_probabilities_and_default_bearing():
    model = zero_model(SMALL)
    with torch.no_grad():
        maps = forward(model, torch.rand(2, 3, 48, 64))

    torch.testing.assert_close(maps.led_probs, torch.full_like(maps.led_probs, 0.5))
    assert torch.all(maps.bearing[:, 0] == 1.0)
    assert torch.all(maps.bearing[:, 1] == 0.0)


def test_forward_rejects_wrong_size():
    model = build_model(SMALL, seed=0)
    with pytest.raises(InvalidInputError):
        forward(model, torch.rand(1, 3, 40, 64))
    with pytest.raises(InvalidInputError):
        forward(model, torch.rand(1, 3, 48, 64), scale=0.5)


def test_identical_images_give_identical_maps():
    model = build_model(SMALL, seed=1).eval()
    image = torch.rand(1, 3, 48, 64)
    with torch.no_grad():
        a = multi_scale_forward(model, image)
        b = multi_scale_forward(model, image.clone())
    assert torch.equal(a.presence, b.presence)
    assert torch.equal(a.led_logits, b.led_logits)


def test_multi_scale_grids_are_aligned_and_normalized():
    model = build_model(SMALL, seed=2).eval()
    with torch.no_grad():
        stack = multi_scale_forward(model, torch.rand(3, 3, 48, 64))

    assert [m.grid for m in stack.maps] == [(6, 8), (3, 4), (1, 2)]
    assert stack.presence.shape == (3, 3, 6, 8)
    assert stack.bearing.shape == (3, 3, 2, 6, 8)
    assert stack.led_logits.shape == (3, 3, 4, 6, 8)
    torch.testing.assert_close(stack.presence.sum(dim=(1, 2, 3)), torch.ones(3), atol=1e-6, rtol=0)
    torch.testing.assert_close(stack.bearing.norm(dim=2), torch.ones(3, 3, 6, 8), atol=1e-6, rtol=0)


def test_constant_presence_is_uniform():
    model = zero_model(SMALL)
    with torch.no_grad():
        stack = multi_scale_forward(model, torch.rand(1, 3, 48, 64))
    n = 3 * 6 * 8
    torch.testing.assert_close(stack.presence, torch.full_like(stack.presence, 1.0 / n))


def random_maps(grid: tuple[int, int], scales: tuple[float, ...], k: int = 4, shift: float = 0.0) -> list[OutputMaps]:
    gen = torch.Generator().manual_seed(0)
    h, w = grid
    return [
        OutputMaps(
            presence_logits=torch.randn(1, h, w, generator=gen, dtype=torch.float64) + shift,
            bearing=torch.randn(1, 2, h, w, generator=gen, dtype=torch.float64),
            led_logits=torch.randn(1, k, h, w, generator=gen, dtype=torch.float64),
            scale=s,
        )
        for s in scales
    ]


def test_presence_is_shift_invariant():
    base = MultiScaleStack.from_maps(random_maps((4, 5), (1.0, 0.5, 0.25)), (40, 32))
    shifted = MultiScaleStack.from_maps(random_maps((4, 5), (1.0, 0.5, 0.25), shift=7.5), (40, 32))
    torch.testing.assert_close(base.presence, shifted.presence, atol=1e-6, rtol=0)


def test_decoded_bearing_is_wrapped():
    stack = MultiScaleStack.from_maps(random_maps((4, 5), (1.0, 0.5)), (40, 32))
    angles = stack.bearing_angle
    assert torch.all(angles > -math.pi) and torch.all(angles <= math.pi)


def test_cells_ignore_pixels_beyond_the_receptive_field():
    cfg = ModelConfig(input_width=160, input_height=96, channels=(16, 16, 16, 16, 16, 16))
    model = build_model(cfg, seed=5).eval()
    row, col = 6, 10
    cy, cx = int((row + 0.5) * cfg.downsample), int((col + 0.5) * cfg.downsample)
    far = receptive_field(cfg) // 2 + cfg.downsample + 7

    image = torch.rand(1, 3, 96, 160)
    distant = image.clone()
    distant[0, :, cy, cx + far] += 1.0
    near = image.clone()
    near[0, :, cy, cx] += 1.0

    with torch.no_grad():
        ref = model(image)[0, :, row, col]
        torch.testing.assert_close(model(distant)[0, :, row, col], ref, atol=1e-6, rtol=0)
        assert not torch.allclose(model(near)[0, :, row, col], ref)
