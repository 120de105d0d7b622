import { describe, expect, it } from 'vitest';

import { parseWireMessage } from '../src/protocol.js';
import { SessionView } from '../src/sessionview.js';

let seq = 0;
const frame = (kind: string, payload: object, t = 0) => ({ kind, payload, seq: seq++, t });

const state = (phase: string, tick: number, q = [0, 0, 0, 0, 0, 0]) =>
  frame('follower_state', {
    phase,
    q,
    ee_position: [0, 0, 0.4],
    ee_orientation: [1, 0, 0, 0],
    tick,
  });

describe('SessionView bookkeeping', () => {
  it('tracks phase from states and event echoes', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(state('IDLE', 0));
    expect(view.phase).toBe('IDLE');
    view.ingest(frame('session_event', { event: 'start', phase: 'MOVING_TO_INIT' }));
    expect(view.phase).toBe('MOVING_TO_INIT');
    expect(view.events.map((e) => e.event)).toEqual(['start']);
  });

  it('collects errors and keeps the last command batch', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(frame('error', { message: 'unknown event' }));
    view.ingest(frame('command_batch', { tick: 7, targets: { '1': 3.5 } }));
    expect(view.errors).toEqual(['unknown event']);
    expect(view.lastTargets['1']).toBe(3.5);
  });

  it('counts dropped frames from seq gaps', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(state('STREAMING', 1));
    seq += 3; // the server shed three frames under backpressure
    view.ingest(state('STREAMING', 5));
    expect(view.droppedFrames).toBe(3);
  });

  it('ignores unknown kinds without falling over', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(frame('metric', { anything: 1 }));
    expect(view.phase).toBe('IDLE');
  });
});

describe('estop latency probe', () => {
  it('a healthy service latches with at most one state in between', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(state('STREAMING', 40));
    view.markEstopSent();
    // one broadcast can already be in flight when the button goes down
    view.ingest(state('STREAMING', 41));
    view.ingest(frame('session_event', { event: 'estop', phase: 'ESTOPPED' }));
    view.ingest(state('ESTOPPED', 41));
    expect(view.estopStatesBetween()).toBe(1);
    expect(view.phase).toBe('ESTOPPED');
  });

  it('immediate latch counts zero states', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(state('STREAMING', 12));
    view.markEstopSent();
    view.ingest(state('ESTOPPED', 12));
    expect(view.estopStatesBetween()).toBe(0);
  });

  it('a slow latch is visible, not hidden', () => {
    seq = 0;
    const view = new SessionView();
    view.ingest(state('STREAMING', 5));
    view.markEstopSent();
    view.ingest(state('STREAMING', 6));
    view.ingest(state('STREAMING', 7));
    view.ingest(state('STREAMING', 8));
    view.ingest(state('ESTOPPED', 8));
    expect(view.estopStatesBetween()).toBe(3);
  });

  it('unresolved probe reports null', () => {
    const view = new SessionView();
    view.markEstopSent();
    expect(view.estopStatesBetween()).toBeNull();
  });
});

describe('wire parsing', () => {
  it('round trips a realistic frame', () => {
    const text = JSON.stringify({
      kind: 'follower_state',
      payload: { phase: 'IDLE', q: [0], ee_position: [0, 0, 0], ee_orientation: [1, 0, 0, 0], tick: 0 },
      seq: 3,
      t: 60.0,
    });
    const msg = parseWireMessage(text);
    expect(msg?.kind).toBe('follower_state');
    expect(msg?.seq).toBe(3);
  });

  it('rejects non-envelopes', () => {
    expect(parseWireMessage('not json')).toBeNull();
    expect(parseWireMessage('42')).toBeNull();
    expect(parseWireMessage('{"kind": "x"}')).toBeNull();
    expect(parseWireMessage('{"kind": "x", "payload": null, "seq": 0, "t": 0}')).toBeNull();
  });
});
