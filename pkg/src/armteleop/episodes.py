"""Episode persistence and deterministic replay.

An episode file is line-delimited JSON: one header line, one line per control
tick, one footer line. Floats survive the round trip bit-exactly (Python's
repr of a float re-parses to the identical double), which is what makes
record-then-replay comparisons meaningful.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .configs import ConfigDescriptor, ConfigId, _coerce_id, load_config
from .errors import ParseError
from .follower import FollowerState, SimBackend
from .mapping import MappingParams, expand_commands

SCHEMA_VERSION = 1
OUTCOMES = ("success", "failure", "estop")


@dataclass(frozen=True)
class EpisodeHeader:
    episode_id: str
    config_id: ConfigId
    params: MappingParams
    vmax_dps: float
    follower_init: tuple[float, ...]
    started_at: str
    task: str | None = None
    schema_version: int = SCHEMA_VERSION

    def to_json_obj(self) -> dict:
        obj = {
            "type": "header",
            "schema_version": self.schema_version,
            "episode_id": self.episode_id,
            "config_id": self.config_id.value,
            "params": {**self.params.to_dict(), "vmax_dps": self.vmax_dps},
            "follower_init": list(self.follower_init),
            "started_at": self.started_at,
        }
        if self.task is not None:
            obj["task"] = self.task
        return obj

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EpisodeHeader":
        params = dict(obj["params"])
        vmax = float(params.pop("vmax_dps"))
        return cls(
            episode_id=obj["episode_id"],
            config_id=_coerce_id(obj["config_id"]),
            params=MappingParams.from_dict(params),
            vmax_dps=vmax,
            follower_init=tuple(float(v) for v in obj["follower_init"]),
            started_at=obj["started_at"],
            task=obj.get("task"),
            schema_version=int(obj["schema_version"]),
        )


@dataclass(frozen=True)
class EpisodeStep:
    t_ms: float
    leader_angles: tuple[float, ...]
    emitted_targets: dict[int, float]  # follower joint (1-based) -> final command
    follower_q: tuple[float, ...]

    def to_json_obj(self) -> dict:
        return {
            "type": "step",
            "t_ms": self.t_ms,
            "leader_angles": list(self.leader_angles),
            "emitted_targets": {str(j): v for j, v in self.emitted_targets.items()},
            "follower_q": list(self.follower_q),
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EpisodeStep":
        return cls(
            t_ms=float(obj["t_ms"]),
            leader_angles=tuple(float(v) for v in obj["leader_angles"]),
            emitted_targets={int(j): float(v) for j, v in obj["emitted_targets"].items()},
            follower_q=tuple(float(v) for v in obj["follower_q"]),
        )


@dataclass(frozen=True)
class EpisodeFooter:
    outcome: str
    duration_s: float
    ticks: int = 0
    skipped_readings: int = 0

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"outcome must be one of {OUTCOMES}, got {self.outcome!r}")

    def to_json_obj(self) -> dict:
        return {
            "type": "footer",
            "outcome": self.outcome,
            "duration_s": self.duration_s,
            "ticks": self.ticks,
            "skipped_readings": self.skipped_readings,
        }

    @classmethod
    def from_json_obj(cls, obj: dict) -> "EpisodeFooter":
        return cls(
            outcome=obj["outcome"],
            duration_s=float(obj["duration_s"]),
            ticks=int(obj.get("ticks", 0)),
            skipped_readings=int(obj.get("skipped_readings", 0)),
        )


@dataclass
class Episode:
    header: EpisodeHeader
    steps: list[EpisodeStep] = field(default_factory=list)
    footer: EpisodeFooter | None = None

    @property
    def config(self) -> ConfigDescriptor:
        return load_config(self.header.config_id)

    def check(self) -> None:
        """Raise ValueError on violated invariants: monotone timestamps,
        footer duration consistent with the step span, in-limit targets."""
        times = [s.t_ms for s in self.steps]
        for a, b in zip(times, times[1:]):
            if not b > a:
                raise ValueError(f"t_ms not strictly increasing at {a} -> {b}")
        if self.footer is not None and self.steps:
            span_s = (times[-1] - times[0]) / 1000.0
            if abs(self.footer.duration_s - span_s) > 1e-3:
                raise ValueError(
                    f"footer duration {self.footer.duration_s}s != step span {span_s}s"
                )
        lo, hi = self.config.limits()
        for s in self.steps:
            for j, v in s.emitted_targets.items():
                if not lo[j - 1] <= v <= hi[j - 1]:
                    raise ValueError(f"target {v} outside limits of joint {j}")


class EpisodeWriter:
    """Single-writer append stream: header on open, one line per step,
    footer on close. Always close (or use as a context manager) — a file
    without a footer reads back as an e-stopped episode."""

    def __init__(self, path, header: EpisodeHeader):
        self.path = Path(path)
        self.header = header
        self._fh = self.path.open("w", encoding="utf-8")
        self._write_obj(header.to_json_obj())
        self.step_count = 0
        self.closed = False
        self._t_first: float | None = None
        self._t_last: float | None = None

    def _write_obj(self, obj: dict) -> None:
        self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")

    def append(self, step: EpisodeStep) -> None:
        if self.closed:
            raise ValueError("episode writer already closed")
        self._write_obj(step.to_json_obj())
        self.step_count += 1
        if self._t_first is None:
            self._t_first = step.t_ms
        self._t_last = step.t_ms

    def close(self, footer: EpisodeFooter) -> None:
        if self.closed:
            return
        self._write_obj(footer.to_json_obj())
        self._fh.close()
        self.closed = True

    def abort(self) -> None:
        """Close the file handle without a footer (simulates a crash)."""
        if not self.closed:
            self._fh.close()
            self.closed = True

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if not self.closed:
            outcome = "estop" if exc_type is not None else "success"
            if self._t_first is not None and self._t_last is not None:
                duration = (self._t_last - self._t_first) / 1000.0
            else:
                duration = 0.0
            self.close(EpisodeFooter(outcome=outcome, duration_s=duration, ticks=self.step_count))
        return False


def write_episode(episode: Episode, path) -> Path:
    if episode.footer is None:
        raise ValueError("cannot write an episode without a footer")
    path = Path(path)
    writer = EpisodeWriter(path, episode.header)
    for s in episode.steps:
        writer.append(s)
    writer.close(episode.footer)
    return path


def read_episode(path, strict: bool = True) -> Episode:
    """Parse an episode file.

    Malformed JSON or wrong record shapes raise ParseError with the 1-based
    line number. A missing footer (truncated recording) is repaired as
    outcome="estop" with a warning rather than rejected.
    """
    path = Path(path)
    header: EpisodeHeader | None = None
    steps: list[EpisodeStep] = []
    footer: EpisodeFooter | None = None
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
            kind = obj.get("type") if isinstance(obj, dict) else None
            try:
                if kind == "header":
                    if header is not None:
                        raise ParseError("duplicate header", lineno)
                    header = EpisodeHeader.from_json_obj(obj)
                elif kind == "step":
                    if header is None:
                        raise ParseError("step before header", lineno)
                    if footer is not None:
                        raise ParseError("step after footer", lineno)
                    steps.append(EpisodeStep.from_json_obj(obj))
                elif kind == "footer":
                    if header is None:
                        raise ParseError("footer before header", lineno)
                    footer = EpisodeFooter.from_json_obj(obj)
                else:
                    raise ParseError(f"unknown record type {kind!r}", lineno)
            except ParseError:
                raise
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad {kind or 'record'}: {exc}", lineno) from None
    if header is None:
        raise ParseError("file has no header line", 1)
    if footer is None:
        warnings.warn(
            f"{path.name}: no footer (truncated recording); treating as e-stopped",
            stacklevel=2,
        )
        span_s = (steps[-1].t_ms - steps[0].t_ms) / 1000.0 if steps else 0.0
        footer = EpisodeFooter(outcome="estop", duration_s=span_s, ticks=len(steps))
    episode = Episode(header=header, steps=steps, footer=footer)
    if strict:
        episode.check()
    return episode


def backend_for(episode: Episode) -> SimBackend:
    """A fresh simulator configured exactly as the recording session's was."""
    params = episode.header.params
    return SimBackend(
        episode.config,
        q0=np.array(episode.header.follower_init),
        vmax_dps=episode.header.vmax_dps,
        dt=params.command_dt,
    )


def replay(episode: Episode, backend: SimBackend) -> list[FollowerState]:
    """Re-execute the recorded targets and return one state per tick.

    The recorded sparse targets are re-expanded into the same clamped
    interpolation lists the live session dispatched, then integrated with the
    same sub-step dt, so a faithful backend reproduces follower_q bit-exactly.
    """
    if backend.config.id != episode.header.config_id:
        raise ValueError(
            f"backend config {backend.config.id.value} != episode "
            f"{episode.header.config_id.value}"
        )
    n = episode.header.params.interp_steps
    lo, hi = backend.config.limits()
    last_cmd = {j + 1: float(v) for j, v in enumerate(episode.header.follower_init)}
    states: list[FollowerState] = []
    for step_rec in episode.steps:
        expanded = {}
        for j in sorted(step_rec.emitted_targets):
            target = step_rec.emitted_targets[j]
            expanded[j] = expand_commands(last_cmd[j], target, n, lo[j - 1], hi[j - 1])
            last_cmd[j] = target
        for s in range(n):
            for j, cmds in expanded.items():
                backend.send_command(cmds[s], j)
            backend.step_time()
        states.append(backend.state)
    return states


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    ticks: int
    max_abs_diff_deg: float
    first_divergent_tick: int | None

    def summary(self) -> str:
        if self.ok:
            return f"replay ok: {self.ticks} ticks reproduced exactly"
        return (
            f"replay DIVERGED at tick {self.first_divergent_tick}: "
            f"max |dq| = {self.max_abs_diff_deg:.9f} deg over {self.ticks} ticks"
        )


def replay_report(episode: Episode, backend: SimBackend | None = None) -> ReplayReport:
    """Replay and compare against the recorded follower_q, bit-exact."""
    states = replay(episode, backend or backend_for(episode))
    max_diff = 0.0
    first_bad: int | None = None
    for i, (rec, st) in enumerate(zip(episode.steps, states)):
        diff = float(np.max(np.abs(np.array(rec.follower_q) - st.q))) if rec.follower_q else 0.0
        if diff > 0.0 and first_bad is None:
            first_bad = i
        max_diff = max(max_diff, diff)
    return ReplayReport(
        ok=first_bad is None,
        ticks=len(states),
        max_abs_diff_deg=max_diff,
        first_divergent_tick=first_bad,
    )
