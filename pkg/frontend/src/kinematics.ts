// Client-side forward kinematics over the served arm descriptor.
//
// This is the same recurrence the service runs: for each joint, translate by
// its link_offset (expressed in the chain frame accumulated so far), then
// rotate about its axis. Keeping the operation order and the quaternion
// formulas identical is what lets the console cross-check the server's
// ee_position / ee_orientation to ~1e-6 instead of "roughly agrees".

import { ArmConfig } from './protocol.js';

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number]; // w first

const AXIS_VECTORS: Record<string, Vec3> = {
  'X': [1, 0, 0], 'Y': [0, 1, 0], 'Z': [0, 0, 1],
  '-X': [-1, 0, 0], '-Y': [0, -1, 0], '-Z': [0, 0, -1],
};

export function axisVector(name: string): Vec3 {
  const v = AXIS_VECTORS[name.toUpperCase()];
  if (!v) throw new Error(`unknown axis ${JSON.stringify(name)}`);
  return v;
}

export function quatMul(a: Quat, b: Quat): Quat {
  const [aw, ax, ay, az] = a;
  const [bw, bx, by, bz] = b;
  return [
    aw * bw - ax * bx - ay * by - az * bz,
    aw * bx + ax * bw + ay * bz - az * by,
    aw * by - ax * bz + ay * bw + az * bx,
    aw * bz + ax * by - ay * bx + az * bw,
  ];
}

export function quatFromAxisAngle(axis: Vec3, angleRad: number): Quat {
  const half = 0.5 * angleRad;
  const s = Math.sin(half);
  return [Math.cos(half), axis[0] * s, axis[1] * s, axis[2] * s];
}

// v' = v + 2*r x (r x v + w*v), r = quaternion vector part
export function quatRotate(q: Quat, v: Vec3): Vec3 {
  const [w, rx, ry, rz] = q;
  const cx = ry * v[2] - rz * v[1] + w * v[0];
  const cy = rz * v[0] - rx * v[2] + w * v[1];
  const cz = rx * v[1] - ry * v[0] + w * v[2];
  return [
    v[0] + 2.0 * (ry * cz - rz * cy),
    v[1] + 2.0 * (rz * cx - rx * cz),
    v[2] + 2.0 * (rx * cy - ry * cx),
  ];
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

/** Distance between unit quaternions, blind to the q/-q sign ambiguity. */
export function quatDistance(a: Quat, b: Quat): number {
  let dPlus = 0, dMinus = 0;
  for (let i = 0; i < 4; i++) {
    dPlus += (a[i] - b[i]) ** 2;
    dMinus += (a[i] + b[i]) ** 2;
  }
  return Math.sqrt(Math.min(dPlus, dMinus));
}

export interface ChainPose {
  /** Origin of each joint frame, base first — dof+1 points, last is the EE. */
  points: Vec3[];
  position: Vec3;
  orientation: Quat;
}

export function fkChain(config: ArmConfig, qDeg: number[]): ChainPose {
  if (qDeg.length !== config.dof) {
    throw new Error(`expected ${config.dof} joint angles, got ${qDeg.length}`);
  }
  let pos: Vec3 = [0, 0, 0];
  let rot: Quat = [1, 0, 0, 0];
  const points: Vec3[] = [pos];
  for (let i = 0; i < config.dof; i++) {
    const joint = config.joints[i];
    const step = quatRotate(rot, joint.link_offset);
    pos = [pos[0] + step[0], pos[1] + step[1], pos[2] + step[2]];
    points.push(pos);
    rot = quatMul(rot, quatFromAxisAngle(axisVector(joint.axis), (qDeg[i] * Math.PI) / 180.0));
  }
  return { points, position: pos, orientation: quatNormalize(rot) };
}

export function forwardKinematics(config: ArmConfig, qDeg: number[]): { position: Vec3; orientation: Quat } {
  const chain = fkChain(config, qDeg);
  return { position: chain.position, orientation: chain.orientation };
}
