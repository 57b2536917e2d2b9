/**
 * Client-side view of a steering session. The view never simulates: every
 * rendered pose came from a server `state` message, and closing the page
 * loses nothing the server does not already know.
 */

import { ServerMessage, StateMsg } from './protocol.js';

export interface ArenaGeometry {
  xmin: number;
  ymin: number;
  xmax: number;
  ymax: number;
  walls: Array<[[number, number], [number, number]]>;
  robotRadius: number;
}

export type OverlayLine = [[number, number], [number, number]];

export const DEFAULT_TRAIL_LIMIT = 2000;

/** Fixed-capacity trail of recent states; overflow drops the oldest. */
export class Trail {
  private buf: StateMsg[] = [];

  constructor(readonly limit = DEFAULT_TRAIL_LIMIT) {}

  push(state: StateMsg): void {
    this.buf.push(state);
    if (this.buf.length > this.limit) {
      this.buf.splice(0, this.buf.length - this.limit);
    }
  }

  get length(): number {
    return this.buf.length;
  }

  at(i: number): StateMsg {
    return this.buf[i];
  }

  last(): StateMsg | undefined {
    return this.buf[this.buf.length - 1];
  }

  toArray(): readonly StateMsg[] {
    return this.buf;
  }

  clear(): void {
    this.buf = [];
  }
}

/**
 * Bounded hand-off queue between the network callback and the render
 * loop. When full, the oldest *state* entry is dropped (it only feeds
 * the trail); control messages (ack/error/verdict) are never dropped.
 */
export class MessageQueue {
  private items: ServerMessage[] = [];
  droppedStates = 0;

  constructor(readonly limit = 512) {}

  push(msg: ServerMessage): void {
    this.items.push(msg);
    if (this.items.length > this.limit) {
      const idx = this.items.findIndex((m) => m.type === 'state');
      if (idx >= 0) {
        this.items.splice(idx, 1);
        this.droppedStates += 1;
      }
      // no droppable state entries: keep everything (control messages
      // must survive even a slow renderer)
    }
  }

  drain(max = Infinity): ServerMessage[] {
    const n = Math.min(max, this.items.length);
    return this.items.splice(0, n);
  }

  get length(): number {
    return this.items.length;
  }
}

export type ConnectionStatus = 'connecting' | 'open' | 'closed' | 'replay';

export interface LogEntry {
  dir: 'sent' | 'recv' | 'info';
  text: string;
}

export class ViewState {
  arena: ArenaGeometry;
  trail: Trail;
  current: StateMsg | null = null;
  previous: StateMsg | null = null;
  gammaDeg = 0;
  pendingGammaDeg: number | null = null; // commanded, not yet acked
  status: ConnectionStatus = 'connecting';
  banner: string | null = null;
  overlay: OverlayLine[] = [];
  verdicts: string[] = [];
  log: LogEntry[] = [];
  logLimit = 200;

  constructor(arena?: ArenaGeometry, trailLimit = DEFAULT_TRAIL_LIMIT) {
    this.arena = arena ?? squareArena(0.6, 0.133);
    this.trail = new Trail(trailLimit);
  }

  apply(msg: ServerMessage): void {
    switch (msg.type) {
      case 'state':
        this.previous = this.current;
        this.current = msg;
        this.gammaDeg = msg.gamma_deg;
        this.trail.push(msg);
        break;
      case 'ack':
        this.pendingGammaDeg = null;
        this.note(`ack ${msg.of} @k=${msg.applied_at_k}`);
        break;
      case 'verdict': {
        const text = `${msg.kind}: ${msg.ok ? 'ok' : 'failed'}`;
        this.verdicts.push(text);
        this.note(`verdict ${text}`);
        break;
      }
      case 'error':
        this.note(`error ${msg.code}${msg.detail ? ': ' + msg.detail : ''}`);
        break;
    }
  }

  note(text: string, dir: LogEntry['dir'] = 'recv'): void {
    this.log.push({ dir, text });
    if (this.log.length > this.logLimit) {
      this.log.splice(0, this.log.length - this.logLimit);
    }
  }

  reset(): void {
    this.trail.clear();
    this.current = null;
    this.previous = null;
    this.verdicts = [];
  }
}

export function squareArena(side: number, robotRadius: number): ArenaGeometry {
  return {
    xmin: 0,
    ymin: 0,
    xmax: side,
    ymax: side,
    walls: [
      [[0, 0], [0, side]],
      [[side, 0], [side, side]],
      [[0, 0], [side, 0]],
      [[0, side], [side, side]],
    ],
    robotRadius,
  };
}

export function freeArena(extent: number, robotRadius: number): ArenaGeometry {
  return {
    xmin: -extent,
    ymin: -extent,
    xmax: extent,
    ymax: extent,
    walls: [],
    robotRadius,
  };
}

/** Target overlays for the two manual steering tasks. */
export function straightTaskOverlay(): OverlayLine[] {
  return [[[0, 0], [1, 0]]];
}

export function turnTaskOverlay(): OverlayLine[] {
  return [
    [[0, 0], [1, 0]],
    [[1, 0], [1, 0.6]],
  ];
}
