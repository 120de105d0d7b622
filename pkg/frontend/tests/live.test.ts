// End-to-end against the real service: spawn `uarm serve` with the simulated
// follower, then run the whole operator walk through the console's own
// client classes. Everything the test knows about the arm comes from
// GET /api/config, same as the browser.

import { ChildProcess, spawn } from 'node:child_process';
import { mkdtempSync } from 'node:fs';
import { tmpdir } from 'node:os';
import path from 'node:path';
import WebSocket from 'ws';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { forwardKinematics, quatDistance } from '../src/kinematics.js';
import { VirtualLeader, startEmitter } from '../src/leader.js';
import {
  ServiceDescription,
  WireMessage,
  isFollowerState,
  isSessionEvent,
} from '../src/protocol.js';
import { SessionView } from '../src/sessionview.js';
import { ServiceClient } from '../src/socket.js';

const PORT = 8700 + (process.pid % 977);
const BASE = `http://127.0.0.1:${PORT}`;
const RATE = 50; // control loop Hz for the spawned service

let server: ChildProcess | null = null;
let serverErr = '';

beforeAll(async () => {
  const dataDir = mkdtempSync(path.join(tmpdir(), 'console-live-'));
  server = spawn(
    'python3',
    [
      '-m', 'armteleop.cli', 'serve',
      '--bind', `127.0.0.1:${PORT}`,
      '--source', 'virtual',
      '--backend', 'sim',
      '--rate', String(RATE),
      '--tau', '0.25',
      '--steps', '2',
      '--alpha', '1',
      '--data-dir', dataDir,
    ],
    { stdio: ['ignore', 'ignore', 'pipe'] },
  );
  server.stderr!.on('data', (chunk) => {
    serverErr += String(chunk);
  });

  const deadline = Date.now() + 30_000;
  for (;;) {
    if (server.exitCode !== null) {
      throw new Error(`service exited before it was up:\n${serverErr.slice(-2000)}`);
    }
    try {
      const res = await fetch(`${BASE}/api/config`);
      if (res.ok) return;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      throw new Error(`service never answered /api/config:\n${serverErr.slice(-2000)}`);
    }
    await new Promise((r) => setTimeout(r, 150));
  }
}, 45_000);

afterAll(() => {
  server?.kill('SIGTERM');
});

describe('live service', () => {
  it('serves a usable arm description', async () => {
    const desc: ServiceDescription = await (await fetch(`${BASE}/api/config`)).json();
    expect(desc.config.dof).toBeGreaterThanOrEqual(6);
    expect(desc.config.joints.length).toBe(desc.config.dof);
    for (const joint of desc.config.joints) {
      expect(joint.range_min).toBeLessThan(joint.range_max);
      expect(joint.link_offset.length).toBe(3);
    }
    expect(desc.params.rate_hz).toBe(RATE);
  });

  it(
    'runs the full operator walk: calibrate, stream, move, e-stop within one tick',
    async () => {
      const desc: ServiceDescription = await (await fetch(`${BASE}/api/config`)).json();
      const config = desc.config;
      const leader = new VirtualLeader(config);
      const view = new SessionView();
      const log: WireMessage[] = [];

      const client = new ServiceClient(`ws://127.0.0.1:${PORT}/ws`, WebSocket as any);
      client.onMessage((msg) => {
        view.ingest(msg);
        log.push(msg);
      });
      await client.connect();

      // greeting arrives without asking
      await client.waitFor(isFollowerState, 5000, 'greeting follower_state');

      // calibration: neutral pose first, then the ceremony, waiting for each ack
      client.sendLeaderAngles(leader.snapshot());
      for (const event of ['start', 'follower_at_init', 'calibration_done'] as const) {
        if (event === 'calibration_done') client.sendLeaderAngles(leader.snapshot());
        client.sendEvent(event);
        await client.waitFor(
          (m) => isSessionEvent(m) && m.payload.event === event,
          8000,
          `${event} ack`,
        );
      }
      expect(view.phase).toBe('STREAMING');

      // stream the slider pose at 50 Hz and nudge joint 1
      let sent = 0;
      const stop = startEmitter(leader, (angles) => {
        if (client.connected) {
          client.sendLeaderAngles(angles);
          sent++;
        }
      });
      const emitStart = Date.now();
      leader.set(0, 15);

      const batch = await client.waitFor((m) => m.kind === 'command_batch', 8000, 'command_batch');
      expect(batch.payload.targets['1']).toBeCloseTo(15, 6);

      await client.waitFor(
        (m) => isFollowerState(m) && m.payload.q[0] > 14.9,
        8000,
        'follower arrival at 15 deg',
      );

      // a slice of live states: client FK must agree with the served pose
      let checked = 0;
      while (checked < 10) {
        const msg = await client.waitFor(isFollowerState, 5000, 'streaming state');
        const payload = msg.payload;
        const mine = forwardKinematics(config, payload.q);
        for (let i = 0; i < 3; i++) {
          expect(Math.abs(mine.position[i] - payload.ee_position[i])).toBeLessThan(1e-6);
        }
        expect(quatDistance(mine.orientation, payload.ee_orientation)).toBeLessThan(1e-6);
        checked++;
      }

      // cadence: the emitter must clear the 20 Hz floor in real time
      const elapsedS = (Date.now() - emitStart) / 1000;
      expect(sent / elapsedS).toBeGreaterThanOrEqual(20);

      // e-stop. Press, then verify the operator-visible latch:
      const lastStreamTick = view.lastState!.tick;
      view.markEstopSent();
      client.sendEvent('estop');
      const latched = await client.waitFor(
        (m) => isFollowerState(m) && m.payload.phase === 'ESTOPPED',
        5000,
        'ESTOPPED follower_state',
      );
      stop();

      // (a) the control loop froze within one tick of the press…
      expect(latched.payload.tick).toBeLessThanOrEqual(lastStreamTick + 1);
      // (b) …and once the server acked the event, no stale STREAMING state followed
      const ackIdx = log.findIndex((m) => isSessionEvent(m) && m.payload.event === 'estop');
      expect(ackIdx).toBeGreaterThanOrEqual(0);
      const statesAfterAck = log.slice(ackIdx + 1).filter(isFollowerState);
      expect(statesAfterAck.length).toBeGreaterThan(0);
      expect(statesAfterAck[0].payload.phase).toBe('ESTOPPED');
      expect(view.phase).toBe('ESTOPPED');

      // the probe saw at most a frame or two of latency end to end
      const between = view.estopStatesBetween();
      expect(between).not.toBeNull();
      expect(between!).toBeLessThanOrEqual(3);

      client.close();
    },
    60_000,
  );
});
