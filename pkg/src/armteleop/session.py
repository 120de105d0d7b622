"""Teleoperation session: lifecycle state machine and per-tick orchestration.

The session owns the mapping state and the follower backend. Phase changes go
through an explicit transition table; the per-tick path (reading -> smooth ->
map -> interpolate -> dispatch -> record) only runs while STREAMING. Any
backend fault trips the e-stop latch rather than propagating.
"""

from __future__ import annotations

import datetime as _dt
import uuid
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np

from .configs import ConfigDescriptor
from .encoder import EncoderFrame, FrameDecoder, MockBus, assemble_reading
from .episodes import EpisodeFooter, EpisodeHeader, EpisodeStep, EpisodeWriter
from .errors import CalibrationError, IncompleteReading, TransitionError
from .follower import DEFAULT_VMAX_DPS, SimBackend
from .kinematics import forward_kinematics
from .mapping import CalibrationState, CommandBatch, MappingParams, calibrate, step


class Phase(str, Enum):
    IDLE = "IDLE"
    MOVING_TO_INIT = "MOVING_TO_INIT"
    CALIBRATING = "CALIBRATING"
    STREAMING = "STREAMING"
    PAUSED = "PAUSED"
    ESTOPPED = "ESTOPPED"
    ENDED = "ENDED"


class Event(str, Enum):
    START = "start"
    FOLLOWER_AT_INIT = "follower_at_init"
    CALIBRATION_DONE = "calibration_done"
    PAUSE = "pause"
    RESUME = "resume"
    END = "end"
    ESTOP = "estop"
    RESET = "reset"


# The e-stop is accepted in every phase (including ESTOPPED, where it simply
# re-latches); everything else is narrow by design.
TRANSITIONS: dict[tuple[Phase, Event], Phase] = {
    (Phase.IDLE, Event.START): Phase.MOVING_TO_INIT,
    (Phase.MOVING_TO_INIT, Event.FOLLOWER_AT_INIT): Phase.CALIBRATING,
    (Phase.CALIBRATING, Event.CALIBRATION_DONE): Phase.STREAMING,
    (Phase.STREAMING, Event.PAUSE): Phase.PAUSED,
    (Phase.PAUSED, Event.RESUME): Phase.STREAMING,
    (Phase.STREAMING, Event.END): Phase.ENDED,
    (Phase.ESTOPPED, Event.RESET): Phase.IDLE,
}
for _phase in Phase:
    TRANSITIONS[(_phase, Event.ESTOP)] = Phase.ESTOPPED


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    config_id: str
    params: MappingParams
    episode_id: str | None = None
    tick_count: int = 0


def next_phase(phase: Phase, event: Event) -> Phase:
    """Pure transition lookup; rejects anything not in the table."""
    try:
        return TRANSITIONS[(phase, event)]
    except KeyError:
        raise TransitionError(phase.value, event.value) from None


def handle_event(state: SessionState, event: Event) -> SessionState:
    return replace(state, phase=next_phase(state.phase, event))


def _utc_now_iso() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="milliseconds")


class TeleopSession:
    """One leader-follower control session over a backend and a reading source.

    ``reading_source`` is any zero-argument callable returning the freshest
    EncoderFrame or None when no complete reading is available. The session is
    single-threaded by contract: all methods must be called from one thread.
    """

    def __init__(
        self,
        config: ConfigDescriptor,
        params: MappingParams,
        backend,
        reading_source,
        follower_init=None,
        record_path=None,
        episode_id: str | None = None,
        task: str | None = None,
    ):
        self.config = config
        self.params = params
        self.backend = backend
        self.reading_source = reading_source
        self.follower_init = (
            np.zeros(config.dof) if follower_init is None else np.asarray(follower_init, dtype=float)
        )
        self.record_path = Path(record_path) if record_path is not None else None
        self.task = task
        self.state = SessionState(
            phase=Phase.IDLE,
            config_id=config.id.value,
            params=params,
            episode_id=episode_id or uuid.uuid4().hex[:12],
        )
        self.calib: CalibrationState | None = None
        self.skipped_readings = 0
        self.last_batch: CommandBatch | None = None
        self.estop_reason: str | None = None
        self.pending_outcome = "success"
        self._writer: EpisodeWriter | None = None
        self._episode_file: Path | None = None
        self.on_state = []  # callables invoked with the follower_state payload

    # -- lifecycle ---------------------------------------------------------

    @property
    def phase(self) -> Phase:
        return self.state.phase

    def dispatch(self, event: Event) -> Phase:
        """Apply one lifecycle event, running its side effects.

        Illegal (phase, event) pairs raise TransitionError and change nothing.
        """
        event = Event(event)
        new = next_phase(self.state.phase, event)  # raises before any effect
        if event is Event.CALIBRATION_DONE and self.calib is None:
            # Completing calibration needs an actual leader reference; grab the
            # freshest reading now, or refuse the transition.
            reading = self.reading_source()
            if reading is None:
                raise CalibrationError("no complete leader reading available to calibrate")
            self.calib = calibrate(
                reading, self.config.vector(self.follower_init), self.params, self.config
            )
        self.state = replace(self.state, phase=new)
        if event is Event.START:
            self.backend.move_to(self.follower_init, blocking=True)
        elif event is Event.CALIBRATION_DONE:
            self._open_writer()
        elif event is Event.ESTOP:
            self._latch_estop("operator e-stop")
        elif event is Event.END:
            self._close_writer(self.pending_outcome)
        elif event is Event.RESET:
            self.calib = None
            self.last_batch = None
            self.estop_reason = None
            self.skipped_readings = 0
            self.state = replace(
                self.state, tick_count=0, episode_id=uuid.uuid4().hex[:12]
            )
        return new

    def estop(self, reason: str = "operator e-stop") -> None:
        self.dispatch(Event.ESTOP)
        if reason != "operator e-stop":
            self.estop_reason = reason

    def _latch_estop(self, reason: str) -> None:
        self.estop_reason = reason
        try:
            # Hold in place: freeze the target at the current pose.
            self.backend.move_to(np.array(self.backend.state.q), blocking=False)
        except Exception:
            pass  # the backend may be the thing that just died
        self._close_writer("estop")

    # -- recording ---------------------------------------------------------

    def _open_writer(self) -> None:
        if self.record_path is None:
            return
        path = self.record_path
        if path.is_dir() or path.suffix == "":
            # Treat as a directory: one file per episode id.
            path.mkdir(parents=True, exist_ok=True)
            path = path / f"{self.state.episode_id}.jsonl"
        self._episode_file = path
        header = EpisodeHeader(
            episode_id=self.state.episode_id,
            config_id=self.config.id,
            params=self.params,
            vmax_dps=float(np.max(self.backend.state.vmax_dps)),
            follower_init=tuple(float(v) for v in self.follower_init),
            started_at=_utc_now_iso(),
            task=self.task,
        )
        self._writer = EpisodeWriter(path, header)

    def _close_writer(self, outcome: str) -> None:
        if self._writer is None or self._writer.closed:
            return
        ticks = self.state.tick_count
        duration_s = max(ticks - 1, 0) / self.params.rate_hz
        self._writer.close(
            EpisodeFooter(
                outcome=outcome,
                duration_s=duration_s,
                ticks=ticks,
                skipped_readings=self.skipped_readings,
            )
        )

    # -- the control tick --------------------------------------------------

    def tick(self) -> EncoderFrame | None:
        """One STREAMING control cycle. Returns the reading used, or None when
        the cycle was skipped (incomplete reading) or tripped the e-stop."""
        if self.state.phase is not Phase.STREAMING:
            raise TransitionError(self.state.phase.value, "tick")
        try:
            reading = self.reading_source()
        except IncompleteReading:
            reading = None
        if reading is None:
            self.skipped_readings += 1
            self._broadcast()
            return None
        batch = step(self.calib, reading, tick=self.state.tick_count)
        try:
            self._dispatch_batch(batch)
            follower_q = tuple(float(v) for v in self.backend.state.q)
        except Exception as exc:
            self.state = replace(self.state, phase=next_phase(self.state.phase, Event.ESTOP))
            self._latch_estop(f"backend fault: {exc}")
            self._broadcast()
            return None
        self.last_batch = batch
        if self._writer is not None:
            t_ms = self.state.tick_count * 1000.0 / self.params.rate_hz
            self._writer.append(
                EpisodeStep(
                    t_ms=t_ms,
                    leader_angles=tuple(float(v) for v in reading.angles_deg),
                    emitted_targets=batch.final_targets(),
                    follower_q=follower_q,
                )
            )
        self.state = replace(self.state, tick_count=self.state.tick_count + 1)
        self._broadcast()
        return reading

    def _dispatch_batch(self, batch: CommandBatch) -> None:
        emitted = batch.emitted_joints
        for s in range(self.params.interp_steps):
            for j in emitted:
                self.backend.send_command(batch.for_joint(j)[s], j)
            self.backend.step_time()

    # -- observation -------------------------------------------------------

    def follower_state_payload(self) -> dict:
        q = np.array(self.backend.state.q)
        pose = forward_kinematics(self.config, q)
        return {
            "phase": self.state.phase.value,
            "q": [float(v) for v in q],
            "ee_position": [float(v) for v in pose.position],
            "ee_orientation": [float(v) for v in pose.orientation],
            "tick": self.state.tick_count,
            "config_id": self.config.id.value,
        }

    def _broadcast(self) -> None:
        if not self.on_state:
            return
        payload = self.follower_state_payload()
        for cb in self.on_state:
            cb(payload)


def run_scripted_session(
    config: ConfigDescriptor,
    script,
    params: MappingParams | None = None,
    vmax_dps: float = DEFAULT_VMAX_DPS,
    out_path=None,
    episode_id: str | None = None,
    task: str | None = None,
    outcome: str = "success",
    ticks: int | None = None,
    seed: int = 0,
    bit_flip_rate: float = 0.0,
    drop_rate: float = 0.0,
):
    """Headless end-to-end run: mock bus -> decoder -> mapping -> simulator.

    Drives the full lifecycle (move to init, calibrate, stream the script,
    end) without wall-clock pacing; one bus poll cycle per control tick.
    Returns the finished TeleopSession.
    """
    params = params or MappingParams()
    bus = MockBus(
        script,
        config,
        rate_hz=params.rate_hz,
        seed=seed,
        bit_flip_rate=bit_flip_rate,
        drop_rate=drop_rate,
    )
    decoder = FrameDecoder()
    counter = {"k": 0}

    def source() -> EncoderFrame | None:
        ts, chunk = bus.cycle(counter["k"])
        counter["k"] += 1
        frames = decoder.feed(chunk, ts)
        try:
            return assemble_reading(frames, config)
        except IncompleteReading:
            return None

    backend = SimBackend(config, vmax_dps=vmax_dps, dt=params.command_dt)
    session = TeleopSession(
        config,
        params,
        backend,
        source,
        follower_init=np.zeros(config.dof),
        record_path=out_path,
        episode_id=episode_id,
        task=task,
    )
    session.pending_outcome = outcome
    session.dispatch(Event.START)
    session.dispatch(Event.FOLLOWER_AT_INIT)
    # Calibration consumes bus cycles starting at 0; with fault injection a
    # cycle may come back incomplete, so allow a few retries.
    for attempt in range(5):
        try:
            session.dispatch(Event.CALIBRATION_DONE)
            break
        except CalibrationError:
            if attempt == 4:
                raise
    if ticks is None:
        ticks = max(int(round(script.duration * params.rate_hz)), 1)
    for _ in range(ticks):
        if session.phase is not Phase.STREAMING:
            break
        session.tick()
    if session.phase is Phase.STREAMING:
        session.dispatch(Event.END)
    return session
