"""ledpose synth - a synthetic stand-in for the two-robot capture rig."""

from ledpose.pose.synth.generate import (
    IMAGES_DIR,
    FramePlan,
    frame_rng,
    generate_dataset,
    plan_frames,
    render_plan,
    sample_pose,
    sample_separated_poses,
)
from ledpose.pose.synth.render import (
    Sample,
    domain_palette,
    in_view,
    led_anchor,
    render_background,
    render_frame,
    render_multi_frame,
    silhouette_box,
)
from ledpose.pose.synth.scene import BackgroundStyle, SceneConfig
from ledpose.pose.synth.visibility import VISIBILITY_EPS, led_visibility_oracle, visible_leds

__all__ = [
    "IMAGES_DIR",
    "VISIBILITY_EPS",
    "BackgroundStyle",
    "FramePlan",
    "Sample",
    "SceneConfig",
    "domain_palette",
    "frame_rng",
    "generate_dataset",
    "in_view",
    "led_anchor",
    "led_visibility_oracle",
    "plan_frames",
    "render_background",
    "render_frame",
    "render_multi_frame",
    "render_plan",
    "sample_pose",
    "sample_separated_poses",
    "silhouette_box",
    "visible_leds",
]
