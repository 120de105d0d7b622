"""Exception and warning types shared across the teleoperation engine."""


class TeleopError(Exception):
    """Base class for all errors raised by this package."""


class ConfigNotFound(TeleopError):
    """Requested arm configuration id is not registered."""


class DimensionError(TeleopError):
    """Joint vector length does not match the configuration's DoF."""


class EncoderRangeError(TeleopError):
    """Raw encoder count outside the 12-bit range, or angle outside 0-270 deg."""


class FramingError(TeleopError):
    """Byte sequence does not start with a valid frame header."""


class ChecksumError(TeleopError):
    """Frame checksum mismatch; the frame must be dropped."""


class IncompleteReading(TeleopError):
    """Not every joint delivered a frame within the sampling window."""


class CalibrationError(TeleopError):
    """Calibration inputs are invalid (e.g. follower init pose out of limits)."""


class TransitionError(TeleopError):
    """Illegal session state transition."""

    def __init__(self, phase, event):
        self.phase = phase
        self.event = event
        super().__init__(f"event {event!r} not allowed in phase {phase!r}")


class MetricError(TeleopError):
    """Metric cannot be computed from the given samples."""


class ParseError(TeleopError):
    """Episode file line failed to parse."""

    def __init__(self, message, line_number):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class EncoderEnvelopeWarning(UserWarning):
    """Absolute encoder reading within the guard band of the 0-270 deg limits."""
