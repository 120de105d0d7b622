"""Velocity-limited kinematic follower: integrates commanded targets under a
per-joint speed cap and reports joint state plus end-effector pose.

No dynamics, gravity, or contact — the simulator exists to validate the
mapping pipeline (command ordering, limits, timing), not physics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .configs import ConfigDescriptor, JointVector, clamp_to_limits
from .errors import DimensionError
from .kinematics import EePose, forward_kinematics

DEFAULT_VMAX_DPS = 90.0
DEFAULT_DT = 1.0 / 250.0  # matches rate_hz * interp_steps at the defaults
ARRIVAL_TOL_DEG = 1e-6


def _readonly(arr) -> np.ndarray:
    out = np.asarray(arr, dtype=float).copy()
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FollowerState:
    """Snapshot of the simulated arm: angles in degrees, vmax in degrees/s."""

    config_id: str
    q: np.ndarray
    q_target: np.ndarray
    vmax_dps: np.ndarray
    sim_time: float

    def joint_vector(self) -> JointVector:
        return JointVector(self.config_id, self.q)


def make_state(config: ConfigDescriptor, q=None, vmax_dps=DEFAULT_VMAX_DPS) -> FollowerState:
    """Initial state at ``q`` (default all-zero), target equal to q."""
    q0 = np.zeros(config.dof) if q is None else np.asarray(q, dtype=float)
    if q0.shape != (config.dof,):
        raise DimensionError(f"q has shape {q0.shape}, expected ({config.dof},)")
    vmax = np.broadcast_to(np.asarray(vmax_dps, dtype=float), (config.dof,)).copy()
    if np.any(vmax <= 0):
        raise ValueError("vmax must be positive for every joint")
    return FollowerState(
        config_id=config.id.value,
        q=_readonly(q0),
        q_target=_readonly(q0),
        vmax_dps=_readonly(vmax),
        sim_time=0.0,
    )


def with_target(state: FollowerState, q_target) -> FollowerState:
    tgt = np.asarray(q_target, dtype=float)
    if tgt.shape != state.q.shape:
        raise DimensionError(f"target has shape {tgt.shape}, expected {state.q.shape}")
    return replace(state, q_target=_readonly(tgt))


def advance(state: FollowerState, dt: float) -> FollowerState:
    """Move every joint toward its target by at most vmax*dt.

    Joints within one step of the target land on it exactly (assigned
    verbatim, not integrated), which keeps long runs free of creep and makes
    replays reproduce recorded state bit-for-bit.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    limit = state.vmax_dps * dt
    delta = state.q_target - state.q
    q_new = state.q + np.clip(delta, -limit, limit)
    arrived = np.abs(delta) <= limit
    q_new[arrived] = state.q_target[arrived]
    return replace(state, q=_readonly(q_new), sim_time=state.sim_time + dt)


def move_to_initial(
    state: FollowerState, q_init, config: ConfigDescriptor, dt: float = DEFAULT_DT
) -> list[FollowerState]:
    """Drive the arm to ``q_init`` and return every visited state.

    The first element is the starting state; each advance appends one more.
    Finishes in at most ceil(max |dq| / (vmax*dt)) + 1 advances.
    """
    q_init = np.asarray(q_init, dtype=float)
    jv = config.vector(q_init)
    if not config.contains(jv):
        raise ValueError(f"initial pose {list(q_init)} outside joint limits")
    state = with_target(state, q_init)
    trajectory = [state]
    worst = float(np.max(np.abs(q_init - state.q) / (state.vmax_dps * dt)))
    budget = math.ceil(worst) + 1
    while np.max(np.abs(state.q - q_init)) > ARRIVAL_TOL_DEG:
        if len(trajectory) - 1 >= budget:
            raise RuntimeError("move_to_initial failed to converge within its step budget")
        state = advance(state, dt)
        trajectory.append(state)
    return trajectory


def ee_trace(states, config: ConfigDescriptor) -> list[EePose]:
    """Forward kinematics of each state, order preserved."""
    return [forward_kinematics(config, s.q) for s in states]


class SimBackend:
    """The simulated follower exposed through the backend interface.

    Commands set per-joint targets; motion happens in ``step_time`` slices,
    which the control loop calls once per interpolation sub-step.
    """

    name = "sim"

    def __init__(
        self,
        config: ConfigDescriptor,
        q0=None,
        vmax_dps=DEFAULT_VMAX_DPS,
        dt: float = DEFAULT_DT,
    ):
        self.config = config
        self.dt = float(dt)
        self._state = make_state(config, q=q0, vmax_dps=vmax_dps)

    @property
    def state(self) -> FollowerState:
        return self._state

    def read_state(self) -> JointVector:
        return self._state.joint_vector()

    def send_command(self, angle_deg: float, joint_index: int) -> None:
        """Set the target of one joint (1-based). Out-of-range targets are
        clamped — the mapping engine already clamps, this is the backstop."""
        tgt = self._state.q_target.copy()
        tgt[joint_index - 1] = angle_deg
        tgt = clamp_to_limits(self.config, self.config.vector(tgt)).as_array()
        self._state = with_target(self._state, tgt)

    def step_time(self, dt: float | None = None) -> FollowerState:
        """Advance the simulation clock by one slice (default self.dt)."""
        self._state = advance(self._state, self.dt if dt is None else dt)
        return self._state

    def move_to(self, q, blocking: bool = True) -> list[FollowerState]:
        if not blocking:
            self._state = with_target(self._state, np.asarray(q, dtype=float))
            return [self._state]
        trajectory = move_to_initial(self._state, q, self.config, dt=self.dt)
        self._state = trajectory[-1]
        return trajectory


class LoopbackBackend:
    """Echo backend: every command takes effect instantly. Useful for tests
    that care about plumbing rather than motion."""

    name = "loopback"

    def __init__(self, config: ConfigDescriptor, q0=None):
        self.config = config
        self._state = make_state(config, q=q0, vmax_dps=1e9)

    @property
    def state(self) -> FollowerState:
        return self._state

    def read_state(self) -> JointVector:
        return self._state.joint_vector()

    def send_command(self, angle_deg: float, joint_index: int) -> None:
        q = self._state.q.copy()
        q[joint_index - 1] = angle_deg
        q = clamp_to_limits(self.config, self.config.vector(q)).as_array()
        self._state = replace(self._state, q=_readonly(q), q_target=_readonly(q))

    def step_time(self, dt: float | None = None) -> FollowerState:
        self._state = replace(self._state, sim_time=self._state.sim_time + (dt or 0.0))
        return self._state

    def move_to(self, q, blocking: bool = True) -> list[FollowerState]:
        q = np.asarray(q, dtype=float)
        self._state = replace(self._state, q=_readonly(q), q_target=_readonly(q))
        return [self._state]


class ExternalBackendStub:
    """Adapter skeleton for a real robot reachable over a local socket.

    Messages are newline-delimited JSON with the same envelope as the session
    socket: commands go out as ``command_batch``, state comes back as
    ``follower_state``. This class documents the contract and fails loudly
    until pointed at a live endpoint; it is not exercised by the test suite.
    """

    name = "external"

    def __init__(self, config: ConfigDescriptor, address: str = "127.0.0.1:8790"):
        self.config = config
        self.address = address
        self._sock = None
        self._seq = 0

    def connect(self):  # pragma: no cover - requires a live robot adapter
        import socket

        host, port = self.address.rsplit(":", 1)
        self._sock = socket.create_connection((host, int(port)), timeout=1.0)
        self._file = self._sock.makefile("rw", encoding="utf-8", newline="\n")

    def _send(self, kind: str, payload: dict):  # pragma: no cover
        import json

        if self._sock is None:
            raise RuntimeError(f"external backend not connected (expected adapter at {self.address})")
        msg = {"kind": kind, "payload": payload, "seq": self._seq, "t": 0}
        self._seq += 1
        self._file.write(json.dumps(msg) + "\n")
        self._file.flush()

    def send_command(self, angle_deg: float, joint_index: int) -> None:  # pragma: no cover
        self._send("command_batch", {"tick": 0, "targets": {str(joint_index): angle_deg}})

    def move_to(self, q, blocking: bool = True):  # pragma: no cover
        self._send("command_batch", {"tick": 0, "targets": {str(i + 1): float(v) for i, v in enumerate(q)}})
        return [self.read_state()] if blocking else []

    def read_state(self) -> JointVector:  # pragma: no cover
        import json

        if self._sock is None:
            raise RuntimeError(f"external backend not connected (expected adapter at {self.address})")
        line = self._file.readline()
        msg = json.loads(line)
        return JointVector(self.config.id, msg["payload"]["q"])

    def step_time(self, dt: float | None = None):  # pragma: no cover
        return None


BACKENDS = {"sim": SimBackend, "loopback": LoopbackBackend, "external": ExternalBackendStub}


def make_backend(name: str, config: ConfigDescriptor, **kwargs):
    try:
        cls = BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown backend {name!r}; expected one of {sorted(BACKENDS)}") from None
    return cls(config, **kwargs)
