"""ledpose inference - pose readout, calibration and map dumps from a trained LED-state network."""

from ledpose.pose.inference.calibrate import (
    MIN_CONFIDENCE,
    CalibrationRequest,
    calibrate_from_image,
    calibrate_from_rf_distance,
    calibrate_from_stack,
)
from ledpose.pose.inference.calibration import CALIBRATION_NAME, Calibration, DistanceWeights
from ledpose.pose.inference.extract import PEAK_THRESHOLD, RobotCandidate, extract_robots
from ledpose.pose.inference.maps import dump_maps, scale_tiles, tile_row
from ledpose.pose.inference.pose import (
    PoseEstimate,
    as_batch,
    estimate_multi_pose,
    estimate_pose,
    estimate_poses,
    estimates_from_stack,
    run_stack,
)
from ledpose.pose.inference.readout import (
    ENTROPY_EPS,
    RESULTANT_EPS,
    PresenceMax,
    bearing_resultant,
    binary_entropy,
    detect_presence_entropy,
    detect_presence_max,
    estimate_bearing,
    estimate_distance,
    localize,
    read_led_states,
    scale_mass,
    uncalibrated_distance,
)

__all__ = [
    # calibration
    "CALIBRATION_NAME",
    "MIN_CONFIDENCE",
    "Calibration",
    "CalibrationRequest",
    "DistanceWeights",
    "calibrate_from_image",
    "calibrate_from_rf_distance",
    "calibrate_from_stack",
    # readout
    "ENTROPY_EPS",
    "RESULTANT_EPS",
    "PresenceMax",
    "bearing_resultant",
    "binary_entropy",
    "detect_presence_entropy",
    "detect_presence_max",
    "estimate_bearing",
    "estimate_distance",
    "localize",
    "read_led_states",
    "scale_mass",
    "uncalibrated_distance",
    # multi-robot
    "PEAK_THRESHOLD",
    "RobotCandidate",
    "extract_robots",
    # end to end
    "PoseEstimate",
    "as_batch",
    "estimate_multi_pose",
    "estimate_pose",
    "estimate_poses",
    "estimates_from_stack",
    "run_stack",
    # visualization
    "dump_maps",
    "scale_tiles",
    "tile_row",
]
