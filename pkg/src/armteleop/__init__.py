"""armteleop: joint-space leader-follower arm teleoperation.

A low-cost leader arm (passive encoder chain) drives a follower robot by
joint-space deviation mapping: calibrate both sides at an initial pose, then
stream smoothed, deadband-filtered, limit-clamped, N-step-interpolated
commands at a fixed control rate. Ships three arm configurations covering
common commercial 6/7-DoF layouts, a velocity-limited kinematic simulator,
deterministic episode recording/replay, evaluation metrics, and a WebSocket
session service with a browser operator console.
"""

from .configs import (
    ConfigDescriptor,
    ConfigId,
    JointSpec,
    JointVector,
    all_config_ids,
    clamp_joint,
    clamp_to_limits,
    compatible_robots,
    in_limits,
    load_config,
    load_config_file,
)
from .encoder import (
    EncoderFrame,
    FrameDecoder,
    MockBus,
    MockScript,
    RawFrame,
    assemble_reading,
    decode_frame,
    degrees_to_raw,
    encode_frame,
    raw_to_degrees,
    reading_from_angles,
)
from .episodes import (
    Episode,
    EpisodeFooter,
    EpisodeHeader,
    EpisodeStep,
    EpisodeWriter,
    read_episode,
    replay,
    replay_report,
    write_episode,
)
from .errors import (
    CalibrationError,
    ChecksumError,
    ConfigNotFound,
    DimensionError,
    EncoderEnvelopeWarning,
    EncoderRangeError,
    FramingError,
    IncompleteReading,
    MetricError,
    ParseError,
    TeleopError,
    TransitionError,
)
from .follower import (
    FollowerState,
    LoopbackBackend,
    SimBackend,
    advance,
    ee_trace,
    make_backend,
    make_state,
    move_to_initial,
    with_target,
)
from .kinematics import EePose, forward_kinematics, quat_distance, quat_mul, quat_rotate
from .mapping import (
    CalibrationState,
    CommandBatch,
    MappingParams,
    calibrate,
    interpolate,
    map_joint,
    smooth,
    step,
)
from .metrics import (
    TrialSeries,
    comparison_report,
    path_length,
    proficiency_curve,
    smoothness,
    time_reduction,
)
from .session import (
    Event,
    Phase,
    SessionState,
    TeleopSession,
    handle_event,
    next_phase,
    run_scripted_session,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationError", "CalibrationState", "ChecksumError", "CommandBatch",
    "ConfigDescriptor", "ConfigId", "ConfigNotFound", "DimensionError",
    "EePose", "EncoderEnvelopeWarning", "EncoderFrame", "EncoderRangeError",
    "Episode", "EpisodeFooter", "EpisodeHeader", "EpisodeStep", "EpisodeWriter",
    "Event", "FollowerState", "FrameDecoder", "FramingError", "IncompleteReading",
    "JointSpec", "JointVector", "LoopbackBackend", "MappingParams", "MetricError",
    "MockBus", "MockScript", "ParseError", "Phase", "RawFrame", "SessionState",
    "SimBackend", "TeleopError", "TeleopSession", "TransitionError", "TrialSeries",
    "advance", "all_config_ids", "assemble_reading", "calibrate", "clamp_joint",
    "clamp_to_limits", "comparison_report", "compatible_robots", "decode_frame",
    "degrees_to_raw", "ee_trace", "encode_frame", "forward_kinematics",
    "handle_event", "in_limits", "interpolate", "load_config", "load_config_file",
    "make_backend", "make_state", "map_joint", "move_to_initial", "next_phase",
    "path_length", "proficiency_curve", "quat_distance", "quat_mul", "quat_rotate",
    "raw_to_degrees", "read_episode", "reading_from_angles", "replay",
    "replay_report", "run_scripted_session", "smooth", "smoothness", "step",
    "time_reduction", "with_target", "write_episode",
]
