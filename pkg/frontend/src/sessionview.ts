// Console-side session state, fed one wire message at a time. Pure data — the
// DOM layer subscribes and renders whatever this says. Keeping it free of
// browser types is what makes it testable under node.

import {
  FollowerStatePayload,
  Phase,
  SessionEventPayload,
  WireMessage,
  isCommandBatch,
  isFollowerState,
  isSessionEvent,
} from './protocol.js';

export interface EstopProbe {
  sentAtTick: number;       // follower tick when the button was pressed
  statesBefore: number;     // non-ESTOPPED follower_state frames seen after pressing
  latchedAtTick: number | null;
}

export class SessionView {
  phase: Phase = 'IDLE';
  lastState: FollowerStatePayload | null = null;
  lastTargets: Record<string, number> = {};
  events: SessionEventPayload[] = [];
  errors: string[] = [];
  lastSeq = -1;
  droppedFrames = 0; // gaps in seq = messages the server shed under backpressure
  estop: EstopProbe | null = null;

  /** Call right before sending the estop event; arms the latency probe. */
  markEstopSent(): void {
    this.estop = {
      sentAtTick: this.lastState ? this.lastState.tick : 0,
      statesBefore: 0,
      latchedAtTick: null,
    };
  }

  ingest(msg: WireMessage): void {
    if (this.lastSeq >= 0 && msg.seq > this.lastSeq + 1) {
      this.droppedFrames += msg.seq - this.lastSeq - 1;
    }
    this.lastSeq = Math.max(this.lastSeq, msg.seq);

    if (isFollowerState(msg)) {
      this.lastState = msg.payload;
      this.phase = msg.payload.phase;
      if (this.estop && this.estop.latchedAtTick === null) {
        if (msg.payload.phase === 'ESTOPPED') {
          this.estop.latchedAtTick = msg.payload.tick;
        } else {
          this.estop.statesBefore += 1;
        }
      }
    } else if (isCommandBatch(msg)) {
      this.lastTargets = msg.payload.targets;
    } else if (isSessionEvent(msg)) {
      this.events.push(msg.payload);
      if (msg.payload.phase) this.phase = msg.payload.phase as Phase;
    } else if (msg.kind === 'error') {
      this.errors.push(String(msg.payload.message));
    }
    // unknown kinds (e.g. future "metric") are deliberately ignored
  }

  /**
   * How many follower_state broadcasts arrived between pressing estop and the
   * latched ESTOPPED state. The press lands between two control ticks, so a
   * healthy service answers 0 or 1 — "within one tick".
   */
  estopStatesBetween(): number | null {
    if (!this.estop || this.estop.latchedAtTick === null) return null;
    return this.estop.statesBefore;
  }
}
