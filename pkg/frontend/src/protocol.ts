/**
 * Wire protocol of the steering server: newline-delimited JSON objects,
 * carried here over WebSocket text frames. Angles are degrees on the
 * wire.
 */

export interface StateMsg {
  type: 'state';
  k: number;
  t: number;
  x: number;
  y: number;
  heading_deg: number;
  gamma_deg: number;
  contact: string | null;
}

export interface AckMsg {
  type: 'ack';
  of: string;
  applied_at_k: number;
}

export interface VerdictMsg {
  type: 'verdict';
  kind: string;
  ok: boolean;
  [extra: string]: unknown;
}

export interface ErrorMsg {
  type: 'error';
  code: string;
  detail?: string;
}

export type ServerMessage = StateMsg | AckMsg | VerdictMsg | ErrorMsg;

export type ClientMessage =
  | { type: 'set_gamma'; deg: number }
  | { type: 'reset'; x: number; y: number; heading_deg: number }
  | { type: 'scenario'; name: string }
  | { type: 'pause' }
  | { type: 'resume' }
  | { type: 'set_speed'; factor: number };

function isFiniteNumber(v: unknown): v is number {
  return typeof v === 'number' && Number.isFinite(v);
}

/** Parse one server line; null for anything malformed or unknown. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof obj !== 'object' || obj === null) return null;
  const msg = obj as Record<string, unknown>;
  switch (msg.type) {
    case 'state':
      if (
        isFiniteNumber(msg.k) &&
        isFiniteNumber(msg.t) &&
        isFiniteNumber(msg.x) &&
        isFiniteNumber(msg.y) &&
        isFiniteNumber(msg.heading_deg) &&
        isFiniteNumber(msg.gamma_deg) &&
        (msg.contact === null || typeof msg.contact === 'string')
      ) {
        return msg as unknown as StateMsg;
      }
      return null;
    case 'ack':
      if (typeof msg.of === 'string' && isFiniteNumber(msg.applied_at_k)) {
        return msg as unknown as AckMsg;
      }
      return null;
    case 'verdict':
      if (typeof msg.kind === 'string' && typeof msg.ok === 'boolean') {
        return msg as unknown as VerdictMsg;
      }
      return null;
    case 'error':
      if (typeof msg.code === 'string') return msg as unknown as ErrorMsg;
      return null;
    default:
      return null;
  }
}

export function serializeClientMessage(msg: ClientMessage): string {
  return JSON.stringify(msg);
}

/** Normalize a gamma command into [0, 360). */
export function wrapGammaDeg(deg: number): number {
  const wrapped = deg % 360;
  return wrapped < 0 ? wrapped + 360 : wrapped;
}
