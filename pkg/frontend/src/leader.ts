// The virtual leader arm: one value per joint, hard-clamped to the ranges the
// service advertised, streamed to the socket on a fixed cadence.

import { ArmConfig } from './protocol.js';

// Comfortably above the 20 Hz floor the control loop expects from a source.
export const EMIT_HZ = 50;

export class VirtualLeader {
  readonly config: ArmConfig;
  private values: number[];

  constructor(config: ArmConfig) {
    this.config = config;
    this.values = config.joints.map(() => 0);
  }

  clamp(joint: number, value: number): number {
    const spec = this.config.joints[joint];
    if (!spec) throw new Error(`joint index ${joint} out of range`);
    if (Number.isNaN(value)) return this.values[joint]; // NaN is poison; ±inf just clamp
    return Math.min(spec.range_max, Math.max(spec.range_min, value));
  }

  set(joint: number, value: number): number {
    const v = this.clamp(joint, value);
    this.values[joint] = v;
    return v;
  }

  setAll(values: number[]): void {
    if (values.length !== this.config.dof) {
      throw new Error(`expected ${this.config.dof} values, got ${values.length}`);
    }
    values.forEach((v, j) => this.set(j, v));
  }

  get(joint: number): number {
    return this.values[joint];
  }

  /** Copy of the current pose — safe to hand to async senders. */
  snapshot(): number[] {
    return this.values.slice();
  }
}

export type Sender = (anglesDeg: number[]) => void;

/**
 * Stream the leader pose at a fixed rate. Returns a stop function.
 * The service keeps only the latest sample, so there is no need to diff.
 */
export function startEmitter(leader: VirtualLeader, send: Sender, hz: number = EMIT_HZ): () => void {
  if (!(hz >= 20)) throw new Error(`emit rate ${hz} Hz is below the 20 Hz floor`);
  const handle = setInterval(() => send(leader.snapshot()), 1000 / hz);
  return () => clearInterval(handle);
}
