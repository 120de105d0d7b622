#!/usr/bin/env python3
"""Velocity-limited follower + forward kinematics.

The simulated follower chases its target at a capped joint speed, so a step
command turns into a linear ramp. Forward kinematics turns the joint track
into an end-effector trace we can inspect.
"""

import numpy as np

from armteleop import advance, ee_trace, forward_kinematics, load_config, make_state, with_target

config = load_config("config1")

state = make_state(config, vmax_dps=60.0)
state = with_target(state, [45.0, -30.0, 20.0, 0.0, 10.0, 0.0])

dt = 0.02  # 50 Hz
track = [state]
while np.max(np.abs(state.q_target - state.q)) > 1e-9:
    state = advance(state, dt)
    track.append(state)

print(f"reached target in {len(track) - 1} steps ({(len(track) - 1) * dt:.2f} s)")
print(f"peak per-step move: {60.0 * dt:.2f} deg (the vmax*dt cap)")

# sample the first joint's ramp
qs = np.array([s.q[0] for s in track])
print("joint 1 ramp:", np.array2string(qs[::8], precision=2))

poses = ee_trace(track, config)
start, end = poses[0], poses[-1]
print(f"\nEE start: {np.array2string(np.asarray(start.position), precision=4)}")
print(f"EE end  : {np.array2string(np.asarray(end.position), precision=4)}")

# FK sanity: rotating only the base keeps the EE on a circle
radii = []
for a in np.linspace(-80, 80, 9):
    p = forward_kinematics(config, [a, 0, 0, 0, 0, 0])
    radii.append(np.hypot(p.position[0], p.position[1]))
print(f"\nbase sweep radius spread: {max(radii) - min(radii):.2e} m (constant, as it must be)")
