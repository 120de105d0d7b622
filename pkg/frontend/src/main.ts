// Browser entry point: wires the served arm descriptor to sliders, the
// session socket, and the canvas. All the logic lives in the imported
// modules; this file is DOM plumbing only.

import { VirtualLeader, startEmitter, EMIT_HZ } from './leader.js';
import { forwardKinematics } from './kinematics.js';
import { ServiceClient } from './socket.js';
import { SessionView } from './sessionview.js';
import { drawSkeleton, fitView } from './skeleton.js';
import { ServiceDescription, SessionEventName, isFollowerState, isSessionEvent } from './protocol.js';

const $ = (id: string) => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id} in index.html`);
  return el;
};

function logLine(text: string, cls = '') {
  const log = $('log');
  const div = document.createElement('div');
  div.textContent = text;
  if (cls) div.className = cls;
  log.prepend(div);
  while (log.childElementCount > 200) log.removeChild(log.lastChild!);
}

async function boot() {
  const res = await fetch('/api/config');
  if (!res.ok) throw new Error(`GET /api/config -> ${res.status}`);
  const desc: ServiceDescription = await res.json();
  const config = desc.config;

  $('title-config').textContent =
    `${config.id} · ${config.dof} joints · ${desc.params.rate_hz} Hz loop · ${desc.backend} backend`;

  const leader = new VirtualLeader(config);
  const view = new SessionView();
  view.phase = desc.phase;

  // --- sliders, one per joint, bounds straight from the served ranges
  const sliderBox = $('sliders');
  const readouts: HTMLElement[] = [];
  config.joints.forEach((joint, j) => {
    const row = document.createElement('div');
    row.className = 'slider-row';

    const label = document.createElement('span');
    label.className = 'slider-label';
    label.textContent = `j${j + 1} ${joint.axis}`;

    const input = document.createElement('input');
    input.type = 'range';
    input.min = String(joint.range_min);
    input.max = String(joint.range_max);
    input.step = '0.1';
    input.value = '0';
    input.addEventListener('input', () => {
      const v = leader.set(j, Number(input.value));
      input.value = String(v); // snap back if the browser let something through
      readout.textContent = `${v.toFixed(1)}°`;
    });

    const readout = document.createElement('span');
    readout.className = 'slider-value';
    readout.textContent = '0.0°';
    readouts.push(readout);

    const range = document.createElement('span');
    range.className = 'slider-range';
    range.textContent = `[${joint.range_min}, ${joint.range_max}]`;

    row.append(label, input, readout, range);
    sliderBox.appendChild(row);
  });

  // --- canvas
  const canvas = $('skeleton') as HTMLCanvasElement;
  const ctx = canvas.getContext('2d')!;
  const canvasView = fitView(config, canvas.width, canvas.height);
  drawSkeleton(ctx, config, config.joints.map(() => 0), canvasView);

  // --- socket
  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  const client = new ServiceClient(`${proto}://${location.host}/ws`);

  const phaseEl = $('phase');
  const render = () => {
    phaseEl.textContent = view.phase;
    phaseEl.dataset.phase = view.phase;
    if (view.lastState) {
      drawSkeleton(ctx, config, view.lastState.q, canvasView);
      $('tick').textContent = `tick ${view.lastState.tick}`;
      // live FK cross-check: our math vs what the service just told us
      const mine = forwardKinematics(config, view.lastState.q);
      const theirs = view.lastState.ee_position;
      const diff = Math.hypot(
        mine.position[0] - theirs[0],
        mine.position[1] - theirs[1],
        mine.position[2] - theirs[2],
      );
      $('fk-check').textContent =
        `EE [${theirs.map((v) => v.toFixed(3)).join(', ')}] m · client FK Δ ${diff.toExponential(1)}`;
      if (view.lastState.estop_reason) {
        $('estop-reason').textContent = view.lastState.estop_reason;
      }
    }
    $('dropped').textContent = view.droppedFrames ? `${view.droppedFrames} dropped` : '';
  };

  client.onMessage((msg) => {
    view.ingest(msg);
    if (isSessionEvent(msg)) logLine(`event ${msg.payload.event} -> ${msg.payload.phase}`, 'ev');
    if (msg.kind === 'error') logLine(`error: ${msg.payload.message}`, 'err');
    if (isFollowerState(msg)) render();
  });

  await client.connect();
  logLine(`connected, streaming leader pose at ${EMIT_HZ} Hz`);
  startEmitter(leader, (angles) => {
    if (client.connected) client.sendLeaderAngles(angles);
  });

  // --- buttons
  const wire = (id: string, event: SessionEventName) =>
    $(id).addEventListener('click', () => {
      if (event === 'estop') view.markEstopSent();
      client.sendEvent(event);
    });
  wire('btn-start', 'start');
  wire('btn-at-init', 'follower_at_init');
  wire('btn-calibrate', 'calibration_done');
  wire('btn-pause', 'pause');
  wire('btn-resume', 'resume');
  wire('btn-end', 'end');
  wire('btn-reset', 'reset');
  wire('btn-estop', 'estop');
}

boot().catch((err) => {
  logLine(String(err), 'err');
  console.error(err);
});
