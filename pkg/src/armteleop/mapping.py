"""Leader-to-follower joint mapping: calibration, smoothing, deadband,
swap/sign handling, limit clamping, and N-step command interpolation.

The per-tick pipeline is ``step``: smooth the latest leader reading, derive a
per-joint target from the deviation since calibration, skip joints whose target
moved less than the deadband since their last emitted command, and expand each
surviving target into N equal interpolation steps from the previous command.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .configs import ConfigDescriptor, JointVector, clamp_joint
from .encoder import EncoderFrame
from .errors import CalibrationError, DimensionError

DEFAULT_TAU_DEG = 0.5
DEFAULT_STEPS = 5
DEFAULT_ALPHA = 0.3
DEFAULT_RATE_HZ = 50.0


@dataclass(frozen=True)
class MappingParams:
    """Tunables of the control loop.

    deadband_tau: degrees; target changes smaller than this are not emitted.
    interp_steps: commands per tick (N); the follower sees rate_hz * N cmd/s.
    ema_alpha: weight of the newest reading in the smoother; 1.0 disables it.
    rate_hz: control loop frequency.
    """

    deadband_tau: float = DEFAULT_TAU_DEG
    interp_steps: int = DEFAULT_STEPS
    ema_alpha: float = DEFAULT_ALPHA
    rate_hz: float = DEFAULT_RATE_HZ

    def __post_init__(self):
        if self.deadband_tau < 0 or math.isnan(self.deadband_tau):
            raise ValueError(f"deadband_tau must be >= 0, got {self.deadband_tau}")
        if not (isinstance(self.interp_steps, int) and self.interp_steps >= 1):
            raise ValueError(f"interp_steps must be a positive integer, got {self.interp_steps}")
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ValueError(f"ema_alpha must be in (0, 1], got {self.ema_alpha}")
        if not self.rate_hz > 0:
            raise ValueError(f"rate_hz must be positive, got {self.rate_hz}")

    @property
    def tick_dt(self) -> float:
        return 1.0 / self.rate_hz

    @property
    def command_dt(self) -> float:
        """Spacing between interpolated commands within one tick."""
        return 1.0 / (self.rate_hz * self.interp_steps)

    def to_dict(self) -> dict:
        return {
            "deadband_tau": self.deadband_tau,
            "interp_steps": self.interp_steps,
            "ema_alpha": self.ema_alpha,
            "rate_hz": self.rate_hz,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "MappingParams":
        known = {f: raw[f] for f in ("deadband_tau", "ema_alpha", "rate_hz") if f in raw}
        if "interp_steps" in raw:
            known["interp_steps"] = int(raw["interp_steps"])
        return cls(**known)


@dataclass
class CalibrationState:
    """Everything the mapping loop carries between ticks.

    leader_init (L0) and follower_init (F0) are fixed at calibration;
    last_cmd starts at F0 and tracks the last emitted target per follower
    joint; filter_state is the smoother's per-joint memory, seeded with L0.
    """

    config: ConfigDescriptor
    params: MappingParams
    leader_init: np.ndarray
    follower_init: np.ndarray
    last_cmd: np.ndarray = field(init=False)
    filter_state: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.leader_init.shape != (self.config.dof,):
            raise DimensionError(
                f"leader_init has shape {self.leader_init.shape}, expected ({self.config.dof},)"
            )
        if self.follower_init.shape != (self.config.dof,):
            raise DimensionError(
                f"follower_init has shape {self.follower_init.shape}, expected ({self.config.dof},)"
            )
        self.last_cmd = self.follower_init.copy()
        self.filter_state = self.leader_init.copy()


@dataclass(frozen=True)
class CommandBatch:
    """Interpolated commands for one tick, indexed by follower joint (1-based
    via ``for_joint``). Each joint's list has length 0 (no emission) or N; the
    last element of an emitted list is the clamped target verbatim.
    """

    lists: tuple[tuple[float, ...], ...]
    tick: int

    def for_joint(self, follower_index: int) -> tuple[float, ...]:
        return self.lists[follower_index - 1]

    @property
    def emitted_joints(self) -> tuple[int, ...]:
        """1-based follower joints that received commands this tick."""
        return tuple(i + 1 for i, cmds in enumerate(self.lists) if cmds)

    def final_targets(self) -> dict[int, float]:
        """follower joint -> last commanded value, for emitted joints only."""
        return {i + 1: cmds[-1] for i, cmds in enumerate(self.lists) if cmds}

    def __bool__(self):
        return any(self.lists)


def calibrate(
    leader_now: EncoderFrame,
    follower_init: JointVector,
    params: MappingParams,
    config: ConfigDescriptor,
) -> CalibrationState:
    """Freeze the reference poses: L0 from the leader reading, F0 from the
    follower's commanded initial pose.
    """
    if leader_now.config_id != config.id or follower_init.config_id != config.id:
        raise CalibrationError(
            f"config mismatch: leader {leader_now.config_id.value}, "
            f"follower {follower_init.config_id.value}, expected {config.id.value}"
        )
    if leader_now.angles_deg.shape != (config.dof,):
        raise DimensionError(
            f"leader reading has {leader_now.angles_deg.shape[0]} joints, expected {config.dof}"
        )
    f0 = follower_init.as_array()
    lo, hi = config.limits()
    if np.any(f0 < lo) or np.any(f0 > hi):
        bad = [i + 1 for i in range(config.dof) if not lo[i] <= f0[i] <= hi[i]]
        raise CalibrationError(f"follower_init outside limits at joints {bad}")
    return CalibrationState(
        config=config,
        params=params,
        leader_init=leader_now.angles_deg.astype(float).copy(),
        follower_init=f0.copy(),
    )


def smooth(calib: CalibrationState, reading: EncoderFrame) -> np.ndarray:
    """Exponential moving average, s <- alpha*x + (1-alpha)*s, updated in place.

    alpha == 1 short-circuits to the raw reading so the disabled filter is an
    exact identity, not merely one within rounding.
    """
    x = reading.angles_deg
    if x.shape != calib.filter_state.shape:
        raise DimensionError(
            f"reading has {x.shape[0]} joints, expected {calib.filter_state.shape[0]}"
        )
    alpha = calib.params.ema_alpha
    if alpha == 1.0:
        calib.filter_state = x.astype(float).copy()
    else:
        calib.filter_state = alpha * x + (1.0 - alpha) * calib.filter_state
    return calib.filter_state.copy()


def map_joint(
    calib: CalibrationState, j: int, smoothed_leader_j: float
) -> tuple[float, bool]:
    """Target for leader joint ``j`` (1-based) and whether it should be emitted.

    The deviation since calibration is re-anchored at the (possibly swapped,
    possibly sign-flipped) follower joint's initial pose; the deadband compares
    that candidate against the joint's last emitted command, so slow drifts
    accumulate instead of being frozen out. Returns the candidate clamped to
    the follower joint's limits.
    """
    follower_j, sign = calib.config.swap_map()[j]
    delta = float(smoothed_leader_j) - float(calib.leader_init[j - 1])
    candidate = sign * delta + float(calib.follower_init[follower_j - 1])
    emit = not abs(candidate - float(calib.last_cmd[follower_j - 1])) < calib.params.deadband_tau
    return clamp_joint(calib.config, follower_j, candidate), emit


def interpolate(start: float, target: float, n: int) -> list[float]:
    """N evenly spaced commands from just above ``start`` to exactly ``target``.

    The i-th value is start + i*(target-start)/n; the final element is
    ``target`` verbatim so repeated batches can never drift.
    """
    if n < 1:
        raise ValueError(f"interpolation steps must be >= 1, got {n}")
    span = target - start
    out = [start + i * span / n for i in range(1, n)]
    out.append(target)
    return out


def expand_commands(start: float, target: float, n: int, lo: float, hi: float) -> tuple[float, ...]:
    """Interpolate and clamp one joint's command list.

    Intermediates are convex combinations of two in-limit endpoints, but the
    last ulp is guarded so no emitted value can ever sit outside the range.
    Episode replay calls this too, so re-expanded commands match recorded ones
    bit-for-bit.
    """
    return tuple(float(min(max(c, lo), hi)) for c in interpolate(start, target, n))


def step(calib: CalibrationState, reading: EncoderFrame, tick: int = 0) -> CommandBatch:
    """One control tick: smooth -> per-joint target -> interpolate -> batch.

    Pure in the functional sense over (calib state, reading): identical
    sequences of readings produce identical batch sequences.
    """
    smoothed = smooth(calib, reading)
    lo, hi = calib.config.limits()
    lists: list[tuple[float, ...]] = [()] * calib.config.dof
    for j in range(1, calib.config.dof + 1):
        target, emit = map_joint(calib, j, float(smoothed[j - 1]))
        if not emit:
            continue
        follower_j, _ = calib.config.swap_map()[j]
        k = follower_j - 1
        lists[k] = expand_commands(
            float(calib.last_cmd[k]), target, calib.params.interp_steps, lo[k], hi[k]
        )
        calib.last_cmd[k] = target
    return CommandBatch(lists=tuple(lists), tick=tick)
