#!/usr/bin/env python3
# The session lifecycle, including what the e-stop does to a live stream.

import numpy as np

from armteleop import (
    Event,
    MappingParams,
    SimBackend,
    TeleopSession,
    load_config,
    reading_from_angles,
)

config = load_config("config1")
params = MappingParams(deadband_tau=0.25, interp_steps=5, ema_alpha=1.0, rate_hz=50.0)

# a "leader" that drifts slowly upward on joint 2
tick_box = {"n": 0}


def leader():
    angles = np.zeros(6)
    angles[1] = 0.05 * tick_box["n"]
    tick_box["n"] += 1
    return reading_from_angles(config, angles, tick_box["n"])


backend = SimBackend(config, dt=params.command_dt)
session = TeleopSession(config, params, backend, leader)

print(f"phase: {session.phase.value}")
for event in (Event.START, Event.FOLLOWER_AT_INIT, Event.CALIBRATION_DONE):
    session.dispatch(event)
    print(f"  {event.value} -> {session.phase.value}")

for _ in range(25):
    session.tick()
print(f"after 25 ticks: joint2 = {backend.state.q[1]:.3f} deg")

session.dispatch(Event.PAUSE)
print(f"paused -> {session.phase.value} (ticks now refuse to run)")
try:
    session.tick()
except Exception as exc:
    print(f"  tick while paused: {type(exc).__name__}: {exc}")

session.dispatch(Event.RESUME)
for _ in range(25):
    session.tick()
print(f"after 25 more: joint2 = {backend.state.q[1]:.3f} deg")

# red button: from any phase, one event, target frozen where it stands
session.estop("demo: red button")
print(f"estop -> {session.phase.value} (reason: {session.estop_reason})")
print(f"  held at joint2 = {backend.state.q_target[1]:.3f} deg")

session.dispatch(Event.RESET)
print(f"reset -> {session.phase.value}, fresh episode id {session.state.episode_id}")
