"""Exception hierarchy shared by every ledpose package."""


class LedPoseError(RuntimeError):
    """Base class for runtime failures raised by ledpose."""


class InvalidInputError(ValueError):
    """A precondition on an argument was violated (non-finite angle, d <= 0, empty list, ...)."""


class DatasetError(LedPoseError):
    """A manifest or image file is missing, unreadable or inconsistent with the model."""


class PoseAccessError(LedPoseError):
    """A consumer without pose access tried to read ground-truth poses or visibility."""


class CalibrationError(LedPoseError):
    """Calibration is absent or was refused."""


class OutputExistsError(LedPoseError):
    """An output path already exists and overwriting was not requested."""
