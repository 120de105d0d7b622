"""Forward kinematics for the serial-chain arm configurations.

The end-effector pose is the ordered product, joint by joint, of
(translate by link_offset, rotate about axis by q_i). Orientation is kept as a
w-first unit quaternion; positions are meters. Angles arrive in degrees and are
converted to radians only inside this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .configs import ConfigDescriptor, JointVector
from .errors import DimensionError


@dataclass(frozen=True)
class EePose:
    """End-effector pose: position (m) and w-first unit quaternion."""

    position: tuple[float, float, float]
    orientation: tuple[float, float, float, float]

    def position_array(self) -> np.ndarray:
        return np.array(self.position, dtype=float)

    def orientation_array(self) -> np.ndarray:
        return np.array(self.orientation, dtype=float)


def quat_mul(a, b):
    """Hamilton product of two w-first quaternions."""
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return (
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    )


def quat_from_axis_angle(axis, angle_rad):
    half = 0.5 * angle_rad
    s = math.sin(half)
    return (math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s)


def quat_rotate(q, v):
    """Rotate 3-vector v by unit quaternion q (w-first)."""
    w, x, y, z = q
    # v' = v + 2*r x (r x v + w*v), r = (x,y,z)
    rx, ry, rz = x, y, z
    cx = ry * v[2] - rz * v[1] + w * v[0]
    cy = rz * v[0] - rx * v[2] + w * v[1]
    cz = rx * v[1] - ry * v[0] + w * v[2]
    return (
        v[0] + 2.0 * (ry * cz - rz * cy),
        v[1] + 2.0 * (rz * cx - rx * cz),
        v[2] + 2.0 * (rx * cy - ry * cx),
    )


def quat_normalize(q):
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    return (q[0] / n, q[1] / n, q[2] / n, q[3] / n)


def quat_distance(a, b) -> float:
    """Distance between unit quaternions, invariant to the q/-q sign ambiguity."""
    d_plus = math.sqrt(sum((ai - bi) ** 2 for ai, bi in zip(a, b)))
    d_minus = math.sqrt(sum((ai + bi) ** 2 for ai, bi in zip(a, b)))
    return min(d_plus, d_minus)


def forward_kinematics(config: ConfigDescriptor, q) -> EePose:
    """Pose of the last joint frame for joint angles ``q`` (degrees).

    ``q`` may be a JointVector or any 1-D sequence of dof angles.
    """
    angles = q.as_array() if isinstance(q, JointVector) else np.asarray(q, dtype=float)
    if angles.shape != (config.dof,):
        raise DimensionError(f"expected {config.dof} joints, got shape {angles.shape}")
    pos = (0.0, 0.0, 0.0)
    rot = (1.0, 0.0, 0.0, 0.0)
    for spec, angle_deg in zip(config.joints, angles):
        step = quat_rotate(rot, spec.link_offset)
        pos = (pos[0] + step[0], pos[1] + step[1], pos[2] + step[2])
        rot = quat_mul(rot, quat_from_axis_angle(spec.axis, math.radians(angle_deg)))
    rot = quat_normalize(rot)
    if rot[0] < 0.0:  # canonical sign: non-negative w
        rot = (-rot[0], -rot[1], -rot[2], -rot[3])
    return EePose(position=pos, orientation=rot)


def zero_pose_position(config: ConfigDescriptor) -> np.ndarray:
    """Sum of link offsets: the end-effector position with all joints at zero."""
    return np.sum([np.array(j.link_offset) for j in config.joints], axis=0)
