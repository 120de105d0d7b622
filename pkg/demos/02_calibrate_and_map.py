#!/usr/bin/env python3
# Calibration and the per-tick mapping step, shown joint by joint.
#
# Calibration snapshots the leader pose (L0) and follower pose (F0); every
# later command is follower = F0 + (leader - L0), smoothed, deadbanded, and
# interpolated. Watch joint 1 below: small jitter stays silenced, a real move
# emits an interpolated ramp, and an out-of-range move is clamped.

import numpy as np

from armteleop import MappingParams, calibrate, load_config, reading_from_angles, step

config = load_config("config1")
params = MappingParams(deadband_tau=0.5, interp_steps=5, ema_alpha=1.0, rate_hz=50.0)

leader_rest = np.array([12.0, -4.0, 0.0, 0.0, 0.0, 0.0])
follower_rest = config.vector([30.0, 0.0, 0.0, 0.0, 0.0, 0.0])

calib = calibrate(reading_from_angles(config, leader_rest, 0), follower_rest, params, config)
print(f"calibrated: L0[1]={calib.leader_init[0]:g} deg, F0[1]={calib.follower_init[0]:g} deg")
print()

moves = [
    ("jitter inside deadband", leader_rest + [0.3, 0, 0, 0, 0, 0]),
    ("a real 10 deg move", leader_rest + [10.0, 0, 0, 0, 0, 0]),
    ("hold (no re-emission)", leader_rest + [10.0, 0, 0, 0, 0, 0]),
    ("way past the joint limit", leader_rest + [200.0, 0, 0, 0, 0, 0]),
]

for tick, (label, leader_now) in enumerate(moves):
    batch = step(calib, reading_from_angles(config, leader_now, tick), tick=tick)
    print(f"tick {tick}: {label}")
    if not batch:
        print("   -> no commands (change below tau)")
    for j in batch.emitted_joints:
        ramp = ", ".join(f"{c:7.3f}" for c in batch.for_joint(j))
        print(f"   joint {j}: [{ramp}]")
    print()

# config2 swaps two channels with inverted sign -- the same +10 deg on leader
# joint 5 comes out as -10 deg on follower joint 6
config2 = load_config("config2")
c2 = calibrate(
    reading_from_angles(config2, np.zeros(6), 0),
    config2.vector(np.zeros(6)),
    MappingParams(deadband_tau=0.25, interp_steps=1, ema_alpha=1.0),
    config2,
)
poke = np.zeros(6)
poke[4] = 10.0
batch = step(c2, reading_from_angles(config2, poke, 1), tick=0)
print(f"config2 channel swap: leader j5 +10 deg -> {batch.final_targets()}")
