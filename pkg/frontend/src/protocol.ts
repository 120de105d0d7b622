// Types for everything the session service speaks. These mirror the JSON
// schemas shipped inside the python package (armteleop/schemas/*.schema.json)
// and docs/protocol.md — if a field changes there it changes here.

export type Phase =
  | 'IDLE'
  | 'MOVING_TO_INIT'
  | 'CALIBRATING'
  | 'STREAMING'
  | 'PAUSED'
  | 'ESTOPPED'
  | 'ENDED';

export type SessionEventName =
  | 'start'
  | 'follower_at_init'
  | 'calibration_done'
  | 'pause'
  | 'resume'
  | 'end'
  | 'estop'
  | 'reset';

export const SESSION_EVENTS: SessionEventName[] = [
  'start', 'follower_at_init', 'calibration_done', 'pause', 'resume', 'end', 'estop', 'reset',
];

export interface JointDescriptor {
  axis: string;                      // "X" | "Y" | "Z", optionally "-" prefixed
  range_min: number;                 // degrees
  range_max: number;
  link_offset: [number, number, number]; // meters, parent frame, zero pose
}

export interface ArmConfig {
  id: string;
  dof: number;
  joints: JointDescriptor[];
  // [leader_joint, follower_joint, sign], 1-based, both directions listed
  swap_pairs: [number, number, number][];
  compatible_robots?: string[];
}

export interface MappingParams {
  deadband_tau: number;
  interp_steps: number;
  ema_alpha: number;
  rate_hz: number;
}

/** Response body of GET /api/config. */
export interface ServiceDescription {
  config: ArmConfig;
  params: MappingParams;
  vmax_dps: number;
  source: string;
  backend: string;
  phase: Phase;
}

export interface FollowerStatePayload {
  phase: Phase;
  q: number[];
  ee_position: [number, number, number];
  ee_orientation: [number, number, number, number]; // w first
  tick: number;
  config_id?: string;
  estop_reason?: string;
}

export interface CommandBatchPayload {
  tick: number;
  targets: Record<string, number>; // 1-based joint -> final target, degrees
}

export interface SessionEventPayload {
  event: SessionEventName;
  phase?: Phase; // present on server echoes
}

export interface ErrorPayload {
  message: string;
  code?: string;
}

export interface WireMessage {
  kind: string;
  payload: any;
  seq: number;
  t: number; // ms since session clock start
}

/** Parse one socket frame; null for anything that is not a valid envelope. */
export function parseWireMessage(text: string): WireMessage | null {
  let obj: any;
  try {
    obj = JSON.parse(text);
  } catch {
    return null;
  }
  if (
    obj === null || typeof obj !== 'object' ||
    typeof obj.kind !== 'string' ||
    typeof obj.seq !== 'number' ||
    typeof obj.t !== 'number' ||
    obj.payload === null || typeof obj.payload !== 'object'
  ) {
    return null;
  }
  return obj as WireMessage;
}

/** Encode an outbound frame. The server ignores client seq/t, so 0 is fine. */
export function envelope(kind: string, payload: object): string {
  return JSON.stringify({ kind, payload, seq: 0, t: 0 });
}

export function isFollowerState(m: WireMessage): m is WireMessage & { payload: FollowerStatePayload } {
  return m.kind === 'follower_state';
}

export function isCommandBatch(m: WireMessage): m is WireMessage & { payload: CommandBatchPayload } {
  return m.kind === 'command_batch';
}

export function isSessionEvent(m: WireMessage): m is WireMessage & { payload: SessionEventPayload } {
  return m.kind === 'session_event';
}
