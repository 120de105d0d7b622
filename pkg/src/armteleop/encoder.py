"""Leader-arm servo encoder bus: frame protocol, decoding, and the mock bus.

Wire format (one frame per servo, 6 bytes):

    [0xFF, 0xFF, id, pos_hi, pos_lo, checksum]

with ``checksum = 0xFF - ((id + pos_hi + pos_lo) mod 256)`` and
``raw_count = pos_hi * 256 + pos_lo`` covering 0..4095 counts over the
0-270 degree encoder span. Servos are passive encoders only; this module never
writes to them. Hardware adapters are expected to translate vendor frames into
this layout at the edge.
"""

from __future__ import annotations

import json
import random
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .configs import ConfigDescriptor, ConfigId
from .errors import (
    ChecksumError,
    EncoderEnvelopeWarning,
    EncoderRangeError,
    FramingError,
    IncompleteReading,
)

FRAME_SIZE = 6
HEADER = b"\xff\xff"
COUNT_MAX = 4095
SERVO_ID_MAX = 253
SPAN_DEG = 270.0
NEUTRAL_DEG = 135.0
ENVELOPE_GUARD_DEG = 2.0


@dataclass(frozen=True)
class RawFrame:
    """One decoded servo frame: id, 12-bit count, and monotonic timestamp."""

    servo_id: int
    raw_count: int
    timestamp_ns: int


@dataclass(frozen=True)
class EncoderFrame:
    """One complete leader reading: neutral-relative joint angles in degrees.

    ``angles_deg[i]`` is the absolute encoder reading of joint i+1 minus the
    135 degree neutral, so straight-at-neutral reads as 0. ``envelope_warnings``
    lists 1-based joints whose absolute reading fell within the guard band of
    the 0/270 electrical limits.
    """

    config_id: ConfigId
    angles_deg: np.ndarray
    timestamp_ns: int
    envelope_warnings: tuple[int, ...] = ()


def raw_to_degrees(raw: int) -> float:
    """Linear map of a 12-bit count onto the absolute 0-270 degree span."""
    if not 0 <= raw <= COUNT_MAX:
        raise EncoderRangeError(f"raw count {raw} outside [0, {COUNT_MAX}]")
    return raw * SPAN_DEG / COUNT_MAX


def degrees_to_raw(angle_deg: float) -> int:
    """Rounding inverse of raw_to_degrees."""
    if not 0.0 <= angle_deg <= SPAN_DEG:
        raise EncoderRangeError(f"angle {angle_deg} outside [0, {SPAN_DEG}]")
    return int(round(angle_deg * COUNT_MAX / SPAN_DEG))


def checksum(servo_id: int, pos_hi: int, pos_lo: int) -> int:
    return 0xFF - ((servo_id + pos_hi + pos_lo) % 256)


def encode_frame(servo_id: int, raw_count: int) -> bytes:
    if not 0 <= servo_id <= SERVO_ID_MAX:
        raise EncoderRangeError(f"servo id {servo_id} outside [0, {SERVO_ID_MAX}]")
    if not 0 <= raw_count <= COUNT_MAX:
        raise EncoderRangeError(f"raw count {raw_count} outside [0, {COUNT_MAX}]")
    hi, lo = raw_count >> 8, raw_count & 0xFF
    return bytes([0xFF, 0xFF, servo_id, hi, lo, checksum(servo_id, hi, lo)])


def decode_frame(buf, timestamp_ns: int | None = None) -> RawFrame:
    """Decode exactly one frame from the first 6 bytes of ``buf``."""
    data = bytes(buf)
    if len(data) < FRAME_SIZE:
        raise FramingError(f"need {FRAME_SIZE} bytes, got {len(data)}")
    if data[0] != 0xFF or data[1] != 0xFF:
        raise FramingError("missing 0xFF 0xFF header")
    servo_id, hi, lo, chk = data[2], data[3], data[4], data[5]
    if chk != checksum(servo_id, hi, lo):
        raise ChecksumError(f"checksum 0x{chk:02X} != 0x{checksum(servo_id, hi, lo):02X}")
    raw = hi * 256 + lo
    if raw > COUNT_MAX:
        raise EncoderRangeError(f"raw count {raw} outside [0, {COUNT_MAX}]")
    if servo_id > SERVO_ID_MAX:
        raise EncoderRangeError(f"servo id {servo_id} outside [0, {SERVO_ID_MAX}]")
    if timestamp_ns is None:
        timestamp_ns = time.monotonic_ns()
    return RawFrame(servo_id=servo_id, raw_count=raw, timestamp_ns=timestamp_ns)


class FrameDecoder:
    """Streaming decoder that resynchronizes on garbage and never raises.

    Counters:
      frames_ok        intact frames emitted
      frames_dropped   header-aligned candidates rejected (checksum/range)
      bytes_discarded  bytes skipped while hunting for a header
    """

    def __init__(self):
        self._buf = b""
        self.frames_ok = 0
        self.frames_dropped = 0
        self.bytes_discarded = 0

    def lost_frame_estimate(self) -> int:
        """Approximate count of frames destroyed by corruption."""
        return self.frames_dropped + round(self.bytes_discarded / FRAME_SIZE)

    def feed(self, data, timestamp_ns: int | None = None) -> list[RawFrame]:
        if timestamp_ns is None:
            timestamp_ns = time.monotonic_ns()
        self._buf += bytes(data)
        out = []
        while True:
            idx = self._buf.find(HEADER)
            if idx < 0:
                # Nothing frameable; keep a trailing 0xFF that may pair with
                # the next chunk's first byte.
                keep = 1 if self._buf.endswith(b"\xff") else 0
                self.bytes_discarded += len(self._buf) - keep
                self._buf = self._buf[len(self._buf) - keep :]
                return out
            if idx > 0:
                self.bytes_discarded += idx
                self._buf = self._buf[idx:]
            if len(self._buf) < FRAME_SIZE:
                return out
            candidate = self._buf[:FRAME_SIZE]
            try:
                frame = decode_frame(candidate, timestamp_ns)
            except (ChecksumError, EncoderRangeError):
                self.frames_dropped += 1
                self._buf = self._buf[self._rescue_offset(candidate) :]
                continue
            out.append(frame)
            self.frames_ok += 1
            self._buf = self._buf[FRAME_SIZE:]

    @staticmethod
    def _rescue_offset(candidate: bytes) -> int:
        # A genuine frame following the rejected candidate can only start at a
        # 0xFF inside it; skip straight past the candidate when none can.
        for i in range(1, FRAME_SIZE):
            if candidate[i] == 0xFF and (i == FRAME_SIZE - 1 or candidate[i + 1] == 0xFF):
                return i
        return FRAME_SIZE


def assemble_reading(frames, config: ConfigDescriptor) -> EncoderFrame:
    """Combine one frame per joint (servo ids 1..dof) into an EncoderFrame.

    Order-insensitive; on duplicate ids the newest frame wins. Raises
    IncompleteReading when any joint is missing. Absolute readings within
    2 degrees of the 0/270 limits are flagged (and warned) but not rejected.
    """
    by_id: dict[int, RawFrame] = {}
    for frame in sorted(frames, key=lambda f: (f.timestamp_ns, f.servo_id, f.raw_count)):
        by_id[frame.servo_id] = frame
    missing = [j for j in range(1, config.dof + 1) if j not in by_id]
    if missing:
        raise IncompleteReading(f"missing servo ids {missing} for {config.id.value}")

    angles = np.empty(config.dof, dtype=float)
    flagged = []
    for j in range(1, config.dof + 1):
        absolute = raw_to_degrees(by_id[j].raw_count)
        if absolute <= ENVELOPE_GUARD_DEG or absolute >= SPAN_DEG - ENVELOPE_GUARD_DEG:
            flagged.append(j)
        angles[j - 1] = absolute - NEUTRAL_DEG
    if flagged:
        warnings.warn(
            f"joints {flagged} within {ENVELOPE_GUARD_DEG} deg of the encoder limits",
            EncoderEnvelopeWarning,
            stacklevel=2,
        )
    angles.flags.writeable = False
    return EncoderFrame(
        config_id=config.id,
        angles_deg=angles,
        timestamp_ns=max(by_id[j].timestamp_ns for j in range(1, config.dof + 1)),
        envelope_warnings=tuple(flagged),
    )


class MockScript:
    """Piecewise-linear trajectory t -> absolute encoder angles (degrees).

    Built from (t_seconds, angles_deg) waypoints; values hold at both ends.
    Angles are absolute encoder degrees, so 135 is the neutral pose.
    """

    def __init__(self, points):
        pts = sorted(((float(t), np.asarray(a, dtype=float)) for t, a in points), key=lambda p: p[0])
        if not pts:
            raise ValueError("script needs at least one waypoint")
        dof = pts[0][1].shape[0]
        if any(a.shape != (dof,) for _, a in pts):
            raise ValueError("all waypoints must list the same number of joints")
        self.times = np.array([t for t, _ in pts])
        self.angles = np.stack([a for _, a in pts])
        self.dof = dof
        self.duration = float(self.times[-1] - self.times[0])

    @classmethod
    def from_file(cls, path) -> "MockScript":
        raw = json.loads(Path(path).read_text())
        return cls([(p["t_seconds"], p["angles_deg"]) for p in raw])

    @classmethod
    def constant(cls, angles_deg, duration_s: float = 1.0) -> "MockScript":
        return cls([(0.0, angles_deg), (duration_s, angles_deg)])

    def __call__(self, t: float) -> np.ndarray:
        return np.array(
            [np.interp(t, self.times, self.angles[:, j]) for j in range(self.dof)]
        )


class MockBus:
    """Deterministic stand-in for the serial bus: frames a script's angles at a
    fixed poll rate, with optional seeded fault injection (bit flips, drops).
    """

    def __init__(
        self,
        script: MockScript,
        config: ConfigDescriptor,
        rate_hz: float = 50.0,
        seed: int = 0,
        bit_flip_rate: float = 0.0,
        drop_rate: float = 0.0,
    ):
        if script.dof != config.dof:
            raise ValueError(f"script has {script.dof} joints, config {config.dof}")
        self.script = script
        self.config = config
        self.rate_hz = float(rate_hz)
        self.bit_flip_rate = float(bit_flip_rate)
        self.drop_rate = float(drop_rate)
        self._rng = random.Random(seed)
        self.frames_emitted = 0
        self.frames_corrupted = 0
        self.frames_dropped_at_source = 0

    def counts_at(self, t_s: float) -> list[int]:
        """Quantized encoder counts the bus would report at time ``t_s``."""
        angles = np.clip(self.script(t_s), 0.0, SPAN_DEG)
        return [degrees_to_raw(a) for a in angles]

    def cycle(self, tick_index: int) -> tuple[int, bytes]:
        """One poll cycle: (timestamp_ns, concatenated frames for all joints)."""
        t_s = tick_index / self.rate_hz
        timestamp_ns = int(round(t_s * 1e9))
        chunk = bytearray()
        for servo_id, raw in enumerate(self.counts_at(t_s), start=1):
            if self.drop_rate and self._rng.random() < self.drop_rate:
                self.frames_dropped_at_source += 1
                continue
            frame = bytearray(encode_frame(servo_id, raw))
            if self.bit_flip_rate and self._rng.random() < self.bit_flip_rate:
                pos = self._rng.randrange(FRAME_SIZE)
                frame[pos] ^= 1 << self._rng.randrange(8)
                self.frames_corrupted += 1
            chunk += frame
            self.frames_emitted += 1
        return timestamp_ns, bytes(chunk)

    def cycles(self, n: int):
        for k in range(n):
            yield self.cycle(k)


class SerialSource:
    """Byte source backed by a serial port (requires the ``serial`` extra).

    Reads whatever bytes are pending; pair with FrameDecoder + assemble_reading
    exactly like the mock bus.
    """

    def __init__(self, device: str, baud: int = 115200, timeout_s: float = 0.02):
        try:
            import serial
        except ImportError as exc:  # pragma: no cover - hardware path
            raise RuntimeError(
                "serial source requires pyserial; install armteleop[serial]"
            ) from exc
        self._port = serial.Serial(device, baudrate=baud, timeout=timeout_s)

    def read(self) -> tuple[int, bytes]:  # pragma: no cover - hardware path
        data = self._port.read(self._port.in_waiting or FRAME_SIZE)
        return time.monotonic_ns(), data

    def close(self):  # pragma: no cover - hardware path
        self._port.close()


def reading_from_angles(config: ConfigDescriptor, relative_deg, timestamp_ns: int) -> EncoderFrame:
    """Build an EncoderFrame directly from neutral-relative degrees.

    Used by the virtual-leader path, where slider values replace the bus.
    """
    arr = np.asarray(relative_deg, dtype=float).copy()
    if arr.shape != (config.dof,):
        raise IncompleteReading(f"expected {config.dof} angles, got {arr.shape}")
    flagged = tuple(
        j
        for j in range(1, config.dof + 1)
        if abs(arr[j - 1]) >= NEUTRAL_DEG - ENVELOPE_GUARD_DEG
    )
    arr.flags.writeable = False
    return EncoderFrame(
        config_id=config.id,
        angles_deg=arr,
        timestamp_ns=timestamp_ns,
        envelope_warnings=flagged,
    )
