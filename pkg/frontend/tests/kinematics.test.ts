import { describe, expect, it } from 'vitest';

import {
  axisVector,
  fkChain,
  forwardKinematics,
  quatDistance,
  quatMul,
  quatNormalize,
} from '../src/kinematics.js';
import { fkFixture as fixture } from './fixture.js';

// The fixture pairs each served config document with poses computed by the
// service's own kinematics. Regenerate with scripts/gen_fk_fixture.py.

describe('fk fixture cross-check', () => {
  it('covers at least 100 states per config', () => {
    expect(fixture.configs.length).toBeGreaterThanOrEqual(3);
    for (const entry of fixture.configs) {
      expect(entry.cases.length).toBeGreaterThanOrEqual(100);
    }
  });

  for (const entry of fixture.configs) {
    const config = entry.config;
    it(`matches the service within 1e-6 on ${config.id}`, () => {
      let worstPos = 0;
      let worstRot = 0;
      for (const c of entry.cases) {
        const got = forwardKinematics(config, c.q);
        for (let i = 0; i < 3; i++) {
          worstPos = Math.max(worstPos, Math.abs(got.position[i] - c.position[i]));
        }
        worstRot = Math.max(
          worstRot,
          quatDistance(got.orientation, c.orientation as [number, number, number, number]),
        );
      }
      expect(worstPos).toBeLessThan(1e-6);
      expect(worstRot).toBeLessThan(1e-6);
    });
  }
});

describe('chain geometry', () => {
  const config = fixture.configs[0].config;

  it('at the zero pose the joints sit at the partial offset sums', () => {
    const chain = fkChain(config, config.joints.map(() => 0));
    expect(chain.points.length).toBe(config.dof + 1);
    let acc: [number, number, number] = [0, 0, 0];
    chain.points.forEach((p, i) => {
      expect(p[0]).toBeCloseTo(acc[0], 12);
      expect(p[1]).toBeCloseTo(acc[1], 12);
      expect(p[2]).toBeCloseTo(acc[2], 12);
      if (i < config.dof) {
        const o = config.joints[i].link_offset;
        acc = [acc[0] + o[0], acc[1] + o[1], acc[2] + o[2]];
      }
    });
  });

  it('rotating only the base keeps the end effector on a circle', () => {
    const radii: number[] = [];
    for (let a = -80; a <= 80; a += 20) {
      const q = config.joints.map(() => 0);
      q[0] = a;
      const { position } = forwardKinematics(config, q);
      radii.push(Math.hypot(position[0], position[1]));
    }
    const spread = Math.max(...radii) - Math.min(...radii);
    expect(spread).toBeLessThan(1e-9);
  });

  it('rejects a joint vector of the wrong length', () => {
    expect(() => forwardKinematics(config, [0, 0])).toThrow(/expected/);
  });
});

describe('quaternion helpers', () => {
  it('parses signed axis names case-insensitively', () => {
    expect(axisVector('z')).toEqual([0, 0, 1]);
    expect(axisVector('-y')).toEqual([0, -1, 0]);
    expect(() => axisVector('w')).toThrow(/unknown axis/);
  });

  it('identity times q is q', () => {
    const q = quatNormalize([0.3, -0.2, 0.8, 0.1]);
    const r = quatMul([1, 0, 0, 0], q);
    expect(quatDistance(q, r)).toBeLessThan(1e-15);
  });

  it('quat distance ignores the global sign', () => {
    const q = quatNormalize([0.5, 0.5, -0.5, 0.5]);
    const neg: [number, number, number, number] = [-q[0], -q[1], -q[2], -q[3]];
    expect(quatDistance(q, neg)).toBeLessThan(1e-15);
  });
});
