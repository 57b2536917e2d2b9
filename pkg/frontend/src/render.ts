/**
 * Canvas renderer. Discrete hops are the honest rendering of the
 * period-discrete model: the robot jumps to each new state. The optional
 * interpolation toggle (off by default) eases between the last two
 * states and is purely cosmetic.
 */

import { StateMsg } from './protocol.js';
import { ArenaGeometry, OverlayLine, ViewState } from './viewstate.js';

export interface RenderOptions {
  interpolate: boolean;
  /** 0..1 progress between previous and current state (cosmetic). */
  tween: number;
}

interface Transform {
  sx: (x: number) => number;
  sy: (y: number) => number;
  scale: number;
}

function fitTransform(arena: ArenaGeometry, w: number, h: number): Transform {
  const margin = 24;
  const spanX = arena.xmax - arena.xmin;
  const spanY = arena.ymax - arena.ymin;
  const scale = Math.min((w - 2 * margin) / spanX, (h - 2 * margin) / spanY);
  const offX = (w - spanX * scale) / 2;
  const offY = (h - spanY * scale) / 2;
  return {
    sx: (x) => offX + (x - arena.xmin) * scale,
    // canvas y grows downward; world y grows upward
    sy: (y) => h - offY - (y - arena.ymin) * scale,
    scale,
  };
}

function robotPose(view: ViewState, opts: RenderOptions):
    { x: number; y: number; headingDeg: number } | null {
  const cur = view.current;
  if (!cur) return null;
  const prev = view.previous;
  if (!opts.interpolate || !prev) {
    return { x: cur.x, y: cur.y, headingDeg: cur.heading_deg };
  }
  const a = Math.min(Math.max(opts.tween, 0), 1);
  return {
    x: prev.x + (cur.x - prev.x) * a,
    y: prev.y + (cur.y - prev.y) * a,
    headingDeg: prev.heading_deg +
      (cur.heading_deg - prev.heading_deg) * a,
  };
}

export function drawFrame(
  ctx: CanvasRenderingContext2D,
  view: ViewState,
  opts: RenderOptions,
): void {
  const { width, height } = ctx.canvas;
  const tf = fitTransform(view.arena, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = '#10141a';
  ctx.fillRect(0, 0, width, height);

  drawOverlay(ctx, tf, view.overlay);
  drawWalls(ctx, tf, view.arena);
  drawTrail(ctx, tf, view);
  const pose = robotPose(view, opts);
  if (pose) drawRobot(ctx, tf, view.arena.robotRadius, pose, view.current!);
}

function drawWalls(ctx: CanvasRenderingContext2D, tf: Transform,
                   arena: ArenaGeometry): void {
  ctx.strokeStyle = '#8899aa';
  ctx.lineWidth = 3;
  for (const [[x1, y1], [x2, y2]] of arena.walls) {
    ctx.beginPath();
    ctx.moveTo(tf.sx(x1), tf.sy(y1));
    ctx.lineTo(tf.sx(x2), tf.sy(y2));
    ctx.stroke();
  }
}

function drawOverlay(ctx: CanvasRenderingContext2D, tf: Transform,
                     overlay: OverlayLine[]): void {
  ctx.strokeStyle = '#3a4a3a';
  ctx.lineWidth = 6;
  ctx.setLineDash([10, 8]);
  for (const [[x1, y1], [x2, y2]] of overlay) {
    ctx.beginPath();
    ctx.moveTo(tf.sx(x1), tf.sy(y1));
    ctx.lineTo(tf.sx(x2), tf.sy(y2));
    ctx.stroke();
  }
  ctx.setLineDash([]);
}

function drawTrail(ctx: CanvasRenderingContext2D, tf: Transform,
                   view: ViewState): void {
  const trail = view.trail.toArray();
  if (trail.length === 0) return;
  ctx.strokeStyle = 'rgba(90, 170, 255, 0.35)';
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(tf.sx(trail[0].x), tf.sy(trail[0].y));
  for (let i = 1; i < trail.length; i++) {
    ctx.lineTo(tf.sx(trail[i].x), tf.sy(trail[i].y));
  }
  ctx.stroke();
  ctx.fillStyle = 'rgba(90, 170, 255, 0.8)';
  for (const s of trail) {
    ctx.beginPath();
    ctx.arc(tf.sx(s.x), tf.sy(s.y), 2, 0, 2 * Math.PI);
    ctx.fill();
  }
}

function drawRobot(
  ctx: CanvasRenderingContext2D,
  tf: Transform,
  radius: number,
  pose: { x: number; y: number; headingDeg: number },
  state: StateMsg,
): void {
  const cx = tf.sx(pose.x);
  const cy = tf.sy(pose.y);
  const r = Math.max(radius * tf.scale, 4);
  ctx.strokeStyle = state.contact ? '#ff8844' : '#66dd88';
  ctx.fillStyle = 'rgba(102, 221, 136, 0.15)';
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.arc(cx, cy, r, 0, 2 * Math.PI);
  ctx.fill();
  ctx.stroke();
  // heading tick: the robot-fixed reference direction
  const h = (pose.headingDeg * Math.PI) / 180;
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + r * Math.cos(h), cy - r * Math.sin(h));
  ctx.stroke();
  // gamma pointer: where the steering module sits relative to the
  // reference direction
  const g = h + (state.gamma_deg * Math.PI) / 180;
  ctx.strokeStyle = '#ddaa44';
  ctx.beginPath();
  ctx.moveTo(cx, cy);
  ctx.lineTo(cx + 0.6 * r * Math.cos(g), cy - 0.6 * r * Math.sin(g));
  ctx.stroke();
}
