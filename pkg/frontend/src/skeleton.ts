// Stick-figure rendering of the follower: joint frames from the FK chain,
// squashed onto the canvas with a fixed axonometric projection. Geometry
// helpers are kept separate from the actual ctx calls so they can be tested
// headless.

import { Vec3, fkChain } from './kinematics.js';
import { ArmConfig } from './protocol.js';

export interface ViewParams {
  width: number;
  height: number;
  scale: number; // pixels per meter
  cx: number;    // canvas position of the world origin
  cy: number;
}

const COS30 = Math.cos(Math.PI / 6);
const SIN30 = Math.sin(Math.PI / 6);

/** World (x, y, z) -> canvas pixels; z is up on screen, x/y recede. */
export function project(p: Vec3, view: ViewParams): [number, number] {
  const sx = (p[0] - p[1]) * COS30;
  const sy = (p[0] + p[1]) * SIN30 - p[2];
  return [view.cx + sx * view.scale, view.cy + sy * view.scale];
}

export function projectChain(points: Vec3[], view: ViewParams): [number, number][] {
  return points.map((p) => project(p, view));
}

/** Fully-stretched length of the chain — an upper bound on any joint's distance. */
export function reachRadius(config: ArmConfig): number {
  let total = 0;
  for (const j of config.joints) {
    const [x, y, z] = j.link_offset;
    total += Math.hypot(x, y, z);
  }
  return total;
}

/** A view that keeps every reachable pose on the canvas, origin slightly low. */
export function fitView(config: ArmConfig, width: number, height: number): ViewParams {
  const reach = reachRadius(config) || 1;
  return {
    width,
    height,
    scale: (0.42 * Math.min(width, height)) / reach,
    cx: width / 2,
    cy: height * 0.62,
  };
}

export function drawSkeleton(
  ctx: CanvasRenderingContext2D,
  config: ArmConfig,
  qDeg: number[],
  view: ViewParams,
): void {
  const chain = fkChain(config, qDeg);
  const pts = projectChain(chain.points, view);

  ctx.clearRect(0, 0, view.width, view.height);

  // ground shadow line through the base
  ctx.strokeStyle = '#2a3140';
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, pts[0][1]);
  ctx.lineTo(view.width, pts[0][1]);
  ctx.stroke();

  // links
  ctx.strokeStyle = '#7fd0ff';
  ctx.lineWidth = 4;
  ctx.lineCap = 'round';
  ctx.beginPath();
  ctx.moveTo(pts[0][0], pts[0][1]);
  for (let i = 1; i < pts.length; i++) ctx.lineTo(pts[i][0], pts[i][1]);
  ctx.stroke();

  // joints
  ctx.fillStyle = '#e8eefb';
  for (let i = 0; i < pts.length - 1; i++) {
    ctx.beginPath();
    ctx.arc(pts[i][0], pts[i][1], 5, 0, 2 * Math.PI);
    ctx.fill();
  }

  // end effector
  const [ex, ey] = pts[pts.length - 1];
  ctx.fillStyle = '#ffb454';
  ctx.beginPath();
  ctx.arc(ex, ey, 7, 0, 2 * Math.PI);
  ctx.fill();
}
