"""Evaluation metrics over recorded episodes and benchmark fixtures:
trajectory path length, mean-squared-jerk smoothness, completion-time
reduction between two input methods, and success-rate-vs-experience curves.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import MetricError


def _positions(trace) -> np.ndarray:
    """Accepts EePose sequences, (x, y, z) tuples, or an (n, 3) array."""
    if len(trace) == 0:
        raise MetricError("empty trace")
    first = trace[0]
    if hasattr(first, "position"):
        return np.array([p.position for p in trace], dtype=float)
    return np.asarray(trace, dtype=float).reshape(len(trace), -1)


def path_length(trace) -> float:
    """Sum of Euclidean gaps between consecutive positions (meters)."""
    pts = _positions(trace)
    if pts.shape[0] < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def smoothness(trace, dt: float) -> float:
    """Mean squared jerk (m^2/s^6) from third finite differences.

    Zero (to rounding) for any trajectory quadratic in time, so straight
    constant-velocity and constant-acceleration paths both score 0; corners
    and stop-go moves score high.
    """
    pts = _positions(trace)
    if pts.shape[0] < 4:
        raise MetricError(f"need >= 4 samples for jerk, got {pts.shape[0]}")
    if not dt > 0:
        raise MetricError(f"dt must be positive, got {dt}")
    jerk = np.diff(pts, n=3, axis=0) / dt**3
    return float(np.mean(np.sum(jerk**2, axis=1)))


def time_reduction(times_a, times_b) -> float:
    """Percent by which method A's mean completion time undercuts method B's:
    100 * (mean(b) - mean(a)) / mean(b)."""
    a = np.asarray(times_a, dtype=float)
    b = np.asarray(times_b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise MetricError("both time lists must be nonempty")
    return float(100.0 * (b.mean() - a.mean()) / b.mean())


@dataclass
class TrialSeries:
    """Ordered trial outcomes for one task; durations in seconds."""

    task: str
    trials: list[tuple[float, str]] = field(default_factory=list)
    bucket_width: int = 10

    def __post_init__(self):
        if self.bucket_width < 1:
            raise ValueError(f"bucket width must be >= 1, got {self.bucket_width}")

    def add(self, duration_s: float, outcome: str) -> None:
        self.trials.append((float(duration_s), outcome))


def proficiency_curve(series: TrialSeries) -> list[float]:
    """Success fraction per consecutive bucket of trials (1..w, w+1..2w, ...).

    The last bucket may be partial; it is averaged over its own size.
    """
    if not series.trials:
        raise MetricError(f"no trials recorded for task {series.task!r}")
    w = series.bucket_width
    out = []
    for i in range(0, len(series.trials), w):
        chunk = series.trials[i : i + w]
        out.append(sum(1 for _, outcome in chunk if outcome == "success") / len(chunk))
    return out


def comparison_report(fixture: dict) -> dict:
    """Two-method benchmark arithmetic from a fixture with per-task times.

    Expects {"tasks": [...], "arm": {"time_s": [...], "success_pct": [...]},
    "joycon": {...}} and returns the per-method means plus the reduction
    percentage of arm relative to joycon.
    """
    arm = np.asarray(fixture["arm"]["time_s"], dtype=float)
    joycon = np.asarray(fixture["joycon"]["time_s"], dtype=float)
    if arm.size != joycon.size or arm.size == 0:
        raise MetricError("fixture time lists must be nonempty and equal length")
    report = {
        "tasks": list(fixture.get("tasks", [])),
        "arm_mean_s": float(arm.mean()),
        "joycon_mean_s": float(joycon.mean()),
        "time_reduction_pct": time_reduction(arm, joycon),
    }
    for key in ("arm", "joycon"):
        rates = fixture.get(key, {}).get("success_pct")
        if rates is not None:
            report[f"{key}_mean_success_pct"] = float(np.mean(rates))
    return report


def load_comparison_fixture(path) -> dict:
    return json.loads(Path(path).read_text())


def episode_report(episode, dt: float | None = None) -> dict:
    """Per-episode metric summary: duration, outcome, EE path length and
    smoothness (when enough follower samples exist)."""
    from .kinematics import forward_kinematics

    config = episode.config
    poses = [forward_kinematics(config, np.array(s.follower_q)) for s in episode.steps]
    tick_dt = dt if dt is not None else episode.header.params.tick_dt
    report = {
        "episode_id": episode.header.episode_id,
        "config_id": episode.header.config_id.value,
        "outcome": episode.footer.outcome if episode.footer else "estop",
        "duration_s": episode.footer.duration_s if episode.footer else 0.0,
        "ticks": len(episode.steps),
        "path_length_m": path_length(poses) if poses else 0.0,
    }
    if len(poses) >= 4:
        report["smoothness_m2_s6"] = smoothness(poses, tick_dt)
    return report


def aligned_text(report: dict, indent: int = 0) -> str:
    """Render a flat report dict as aligned key/value text."""
    pad = " " * indent
    keys = list(report)
    width = max(len(k) for k in keys)
    lines = []
    for k in keys:
        v = report[k]
        if isinstance(v, float):
            v = f"{v:.4f}"
        lines.append(f"{pad}{k:<{width}}  {v}")
    return "\n".join(lines)
