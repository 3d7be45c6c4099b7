"""8-bit RGB PNG reading and writing for float images in [0, 1]."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import NDArray
from PIL import Image, UnidentifiedImageError

from ledpose.pose.core.errors import DatasetError


def to_uint8(image: NDArray[np.floating]) -> NDArray[np.uint8]:
    return np.clip(np.rint(np.asarray(image) * 255.0), 0, 255).astype(np.uint8)


def save_image(path: Path, image: NDArray[np.floating]) -> None:
    """Write an H×W×3 float image (or H×W grayscale) as PNG."""
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(to_uint8(image)).save(path, format="PNG")


def load_image(path: Path) -> NDArray[np.float32]:
    """Read an image file as an H×W×3 float32 array in [0, 1]."""
    try:
        with Image.open(path) as img:
            rgb = np.asarray(img.convert("RGB"), dtype=np.float32)
    except (FileNotFoundError, UnidentifiedImageError, OSError) as e:
        raise DatasetError(f"cannot read image {path}: {e}") from e
    return rgb / 255.0
