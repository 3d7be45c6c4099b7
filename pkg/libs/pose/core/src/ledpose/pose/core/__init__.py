"""ledpose core - geometry, angle arithmetic, manifests and run bookkeeping."""

from ledpose.pose.core.digest import derive_seed, file_digest
from ledpose.pose.core.errors import (
    CalibrationError,
    DatasetError,
    InvalidInputError,
    LedPoseError,
    OutputExistsError,
    PoseAccessError,
)
from ledpose.pose.core.geometry import (
    TWO_PI,
    CameraIntrinsics,
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
from ledpose.pose.core.images import load_image, save_image, to_uint8
from ledpose.pose.core.manifest import DatasetManifest, ManifestAccessor, SampleRecord
from ledpose.pose.core.noise import gradient_noise
from ledpose.pose.core.rundir import ProducedFile, RunRecord, prepare_output, run_lock, write_run_record

__all__ = [
    # errors
    "CalibrationError",
    "DatasetError",
    "InvalidInputError",
    "LedPoseError",
    "OutputExistsError",
    "PoseAccessError",
    # geometry
    "TWO_PI",
    "CameraIntrinsics",
    "LedConfiguration",
    "LedStateVector",
    "Pose2D",
    "back_project",
    "circular_error",
    "circular_mean",
    "pose_accuracy_gamma",
    "project_pose",
    "wrap_angle",
    "wrap_angle_array",
    # data
    "DatasetManifest",
    "ManifestAccessor",
    "SampleRecord",
    "gradient_noise",
    "load_image",
    "save_image",
    "to_uint8",
    # runs
    "ProducedFile",
    "RunRecord",
    "derive_seed",
    "file_digest",
    "prepare_output",
    "run_lock",
    "write_run_record",
]

__version__ = "0.1.0"
