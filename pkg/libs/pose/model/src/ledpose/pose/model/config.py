"""Architecture configuration and receptive-field arithmetic."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field, model_validator

FULL_WIDTHS = (24, 32, 64, 72, 80, 80)
DESK_WIDTHS = (16, 24, 40, 48, 56, 56)


class ModelConfig(BaseModel):
    """Shape of the backbone: conv-BN-ReLU blocks, 2x max-pooling after the first ``pooled_blocks``."""

    model_config = ConfigDict(frozen=True)

    input_width: int = Field(default=320, gt=0)
    input_height: int = Field(default=176, gt=0)
    channels: tuple[int, ...] = DESK_WIDTHS
    kernel_size: int = Field(default=3, ge=1)
    pooled_blocks: int = Field(default=3, ge=0)
    led_count: int = Field(default=4, ge=1)
    scale_factors: tuple[float, ...] = (1.0, 0.5, 0.25)

    @model_validator(mode="after")
    def _check_shape(self) -> ModelConfig:
        if not self.channels or any(c <= 0 for c in self.channels):
            raise ValueError("channels must list at least one positive width")
        if self.pooled_blocks > len(self.channels):
            raise ValueError("cannot pool after more blocks than the network has")
        if self.kernel_size % 2 == 0:
            raise ValueError("kernel_size must be odd")
        factors = self.scale_factors
        if not factors or factors[0] != 1.0:
            raise ValueError("the first scale factor must be 1")
        if any(b >= a for a, b in zip(factors, factors[1:], strict=False)) or factors[-1] <= 0:
            raise ValueError("scale factors must be positive and strictly decreasing")
        for s in factors:
            k = 1.0 / s
            if abs(k - round(k)) > 1e-9:
                raise ValueError(f"scale factor {s} is not the inverse of an integer pooling kernel")
        d = self.downsample
        if self.input_width % d or self.input_height % d:
            raise ValueError(
                f"input {self.input_width}x{self.input_height} is not divisible by the downsample factor {d}"
            )
        for s in factors:
            w, h = self.grid_shape(s)
            if w < 1 or h < 1:
                raise ValueError(f"scale {s} produces an empty output grid")
        return self

    @property
    def downsample(self) -> int:
        return 2**self.pooled_blocks

    @property
    def block_count(self) -> int:
        return len(self.channels)

    @property
    def head_channels(self) -> int:
        """1 presence + 2 bearing (cos, sin) + K LED channels."""
        return 3 + self.led_count

    def pool_kernel(self, scale: float) -> int:
        return int(round(1.0 / scale))

    def scaled_input(self, scale: float) -> tuple[int, int]:
        """(width, height) of the image fed to the network at ``scale``."""
        k = self.pool_kernel(scale)
        return self.input_width // k, self.input_height // k

    def grid_shape(self, scale: float = 1.0) -> tuple[int, int]:
        """(width, height) of the output grid at ``scale``; each pooling floors."""
        w, h = self.scaled_input(scale)
        for _ in range(self.pooled_blocks):
            w, h = w // 2, h // 2
        return w, h

    @classmethod
    def full(cls, led_count: int = 4) -> ModelConfig:
        """640x360 input, 80x45 grid, about 178K parameters."""
        return cls(input_width=640, input_height=360, channels=FULL_WIDTHS, led_count=led_count)

    @classmethod
    def desk(cls, led_count: int = 4) -> ModelConfig:
        """320x176 input, 40x22 grid."""
        return cls(input_width=320, input_height=176, channels=DESK_WIDTHS, led_count=led_count)


def receptive_field(cfg: ModelConfig) -> int:
    """Theoretical receptive field of one output cell at scale 1, in input pixels."""
    rf, jump = 1, 1
    for block in range(cfg.block_count):
        rf += (cfg.kernel_size - 1) * jump
        if block < cfg.pooled_blocks:
            rf += jump
            jump *= 2
    return rf


__all__ = ["DESK_WIDTHS", "FULL_WIDTHS", "ModelConfig", "receptive_field"]
