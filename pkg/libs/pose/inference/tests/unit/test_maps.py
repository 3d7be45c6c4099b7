import math

import numpy as np
import pytest
import torch
from PIL import Image

from ledpose.pose.core import InvalidInputError
from ledpose.pose.inference import dump_maps, run_stack, scale_tiles, tile_row
from ledpose.pose.model import ModelConfig, build_model

SMALL = ModelConfig(input_width=64, input_height=48, channels=(4, 4, 6, 6, 8, 8))


def small_stack():
    model = build_model(SMALL, seed=1)
    image = np.random.default_rng(0).random((48, 64, 3)).astype(np.float32)
    return run_stack(model, image)


def test_dump_maps_writes_one_png_per_scale(tmp_path):
    paths = dump_maps(small_stack(), tmp_path / "maps", upscale=2)

    assert [p.name for p in paths] == ["maps_s0.png", "maps_s1.png", "maps_s2.png"]
    with Image.open(paths[0]) as img:
        # presence, bearing and four LED tiles of 8x6 cells, 1 px apart
        assert img.size == (6 * 16 + 5, 12)
        assert img.mode == "L"


def test_tiles_are_in_unit_range():
    tiles = scale_tiles(small_stack(), 0)
    assert len(tiles) == 2 + SMALL.led_count
    for tile in tiles:
        assert tile.shape == (6, 8)
        assert tile.min() >= 0.0 and tile.max() <= 1.0


def test_bearing_tile_maps_angle_to_unit_interval():
    stack = small_stack()
    tile = scale_tiles(stack, 1)[1]
    angle = stack.bearing_angle[0, 1].double().numpy()
    assert tile == pytest.approx((angle + math.pi) / (2 * math.pi))


def test_tile_row_upscales_and_separates():
    row = tile_row([np.zeros((2, 3)), np.full((2, 3), 0.5)], upscale=2)
    assert row.shape == (4, 13)
    assert (row[:, :6] == 0).all()
    assert (row[:, 6] == 1).all()
    assert (row[:, 7:] == 0.5).all()


def test_dump_maps_rejects_batches(tmp_path):
    model = build_model(SMALL, seed=1)
    stack = run_stack(model, torch.rand(2, 3, 48, 64))
    with pytest.raises(InvalidInputError):
        dump_maps(stack, tmp_path)
