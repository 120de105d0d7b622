import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';

import { EMIT_HZ, VirtualLeader, startEmitter } from '../src/leader.js';
import { fkFixture as fixture } from './fixture.js';

const config = fixture.configs[0].config;

describe('VirtualLeader clamping', () => {
  it('starts at the neutral pose', () => {
    const leader = new VirtualLeader(config);
    expect(leader.snapshot()).toEqual(config.joints.map(() => 0));
  });

  it('clamps every joint to the served range', () => {
    const leader = new VirtualLeader(config);
    config.joints.forEach((joint, j) => {
      expect(leader.set(j, joint.range_max + 1000)).toBe(joint.range_max);
      expect(leader.set(j, joint.range_min - 1000)).toBe(joint.range_min);
      const mid = (joint.range_min + joint.range_max) / 2;
      expect(leader.set(j, mid)).toBe(mid);
    });
  });

  it('ignores NaN and infinities instead of poisoning the pose', () => {
    const leader = new VirtualLeader(config);
    leader.set(0, 10);
    expect(leader.set(0, NaN)).toBe(10);
    expect(leader.set(0, Infinity)).toBe(config.joints[0].range_max);
    expect(leader.get(0)).toBe(config.joints[0].range_max);
  });

  it('rejects a wrong-length pose and bad joint indices', () => {
    const leader = new VirtualLeader(config);
    expect(() => leader.setAll([1, 2])).toThrow(/expected/);
    expect(() => leader.set(99, 0)).toThrow(/out of range/);
  });

  it('snapshots are copies, not live references', () => {
    const leader = new VirtualLeader(config);
    const snap = leader.snapshot();
    leader.set(0, 5);
    expect(snap[0]).toBe(0);
  });
});

describe('emitter cadence', () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it('streams at 50 Hz by default — 50 frames per simulated second', () => {
    const leader = new VirtualLeader(config);
    const frames: number[][] = [];
    const stop = startEmitter(leader, (angles) => frames.push(angles));
    vi.advanceTimersByTime(1000);
    stop();
    expect(EMIT_HZ).toBe(50);
    expect(frames.length).toBe(50);
    // well above the 20 Hz floor a control loop needs from its source
    expect(frames.length).toBeGreaterThanOrEqual(20);
  });

  it('frames carry the pose at send time', () => {
    const leader = new VirtualLeader(config);
    const frames: number[][] = [];
    const stop = startEmitter(leader, (angles) => frames.push(angles));
    vi.advanceTimersByTime(100);
    leader.set(0, 12.5);
    vi.advanceTimersByTime(100);
    stop();
    expect(frames[0][0]).toBe(0);
    expect(frames[frames.length - 1][0]).toBe(12.5);
  });

  it('stops cleanly and refuses sub-20 Hz rates', () => {
    const leader = new VirtualLeader(config);
    let count = 0;
    const stop = startEmitter(leader, () => count++);
    vi.advanceTimersByTime(200);
    stop();
    vi.advanceTimersByTime(500);
    expect(count).toBe(10);
    expect(() => startEmitter(leader, () => {}, 5)).toThrow(/20 Hz floor/);
  });
});
