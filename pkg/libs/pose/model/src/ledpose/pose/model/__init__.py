"""ledpose model - the LED-state network, its multi-scale stack and the self-supervised objective."""

from ledpose.pose.model.checkpoint import Checkpoint, load_checkpoint, load_model, save_checkpoint
from ledpose.pose.model.config import DESK_WIDTHS, FULL_WIDTHS, ModelConfig, receptive_field
from ledpose.pose.model.network import (
    ZERO_BEARING_EPS,
    LedPoseNet,
    MultiScaleStack,
    OutputMaps,
    build_model,
    count_parameters,
    downscale,
    forward,
    image_to_tensor,
    multi_scale_forward,
    normalize_bearing,
)
from ledpose.pose.model.objective import (
    BCE_EPS,
    LossBreakdown,
    bce_map,
    chance_loss,
    localization_loss,
    multi_scale_loss,
    visibility_weights,
)

__all__ = [
    # config
    "DESK_WIDTHS",
    "FULL_WIDTHS",
    "ModelConfig",
    "receptive_field",
    # network
    "ZERO_BEARING_EPS",
    "LedPoseNet",
    "MultiScaleStack",
    "OutputMaps",
    "build_model",
    "count_parameters",
    "downscale",
    "forward",
    "image_to_tensor",
    "multi_scale_forward",
    "normalize_bearing",
    # objective
    "BCE_EPS",
    "LossBreakdown",
    "bce_map",
    "chance_loss",
    "localization_loss",
    "multi_scale_loss",
    "visibility_weights",
    # checkpoints
    "Checkpoint",
    "load_checkpoint",
    "load_model",
    "save_checkpoint",
]
