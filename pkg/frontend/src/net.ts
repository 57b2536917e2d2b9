/**
 * WebSocket client wrapper: parses inbound frames into the bounded queue,
 * buffers outbound messages while disconnected (flushed on reconnect),
 * and auto-reconnects with a session-reset warning (the server starts a
 * fresh session per connection).
 */

import {
  ClientMessage,
  parseServerMessage,
  serializeClientMessage,
} from './protocol.js';
import { MessageQueue, ViewState } from './viewstate.js';

export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type WsFactory = (url: string) => WebSocketLike;

const WS_OPEN = 1;

export class SteerConnection {
  private ws: WebSocketLike | null = null;
  private outbox: string[] = [];
  private reconnectTimer: ReturnType<typeof setTimeout> | null = null;
  private closedByUser = false;
  reconnectDelayMs = 2000;

  constructor(
    readonly url: string,
    readonly queue: MessageQueue,
    readonly view: ViewState,
    private readonly wsFactory: WsFactory = (u) =>
      new WebSocket(u) as unknown as WebSocketLike,
    private readonly schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> =
      (fn, ms) => setTimeout(fn, ms),
  ) {}

  connect(): void {
    this.closedByUser = false;
    this.view.status = 'connecting';
    const ws = this.wsFactory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.view.status = 'open';
      this.view.banner = null;
      const buffered = this.outbox.splice(0);
      for (const line of buffered) ws.send(line);
      if (buffered.length > 0) {
        this.view.note(`flushed ${buffered.length} buffered message(s)`, 'info');
      }
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data !== 'string') return;
      const msg = parseServerMessage(ev.data);
      if (msg) this.queue.push(msg);
    };
    ws.onclose = () => {
      if (this.view.status === 'open') {
        this.view.banner =
          'connection lost - reconnecting starts a fresh session';
      }
      this.view.status = 'closed';
      if (!this.closedByUser) {
        this.reconnectTimer = this.schedule(() => this.connect(),
                                            this.reconnectDelayMs);
      }
    };
    ws.onerror = () => {
      /* onclose follows and handles the retry */
    };
  }

  get isOpen(): boolean {
    return this.ws !== null && this.ws.readyState === WS_OPEN;
  }

  /** Send now, or buffer with a visible warning while disconnected. */
  send(msg: ClientMessage): void {
    const line = serializeClientMessage(msg);
    this.view.note(line, 'sent');
    if (this.isOpen) {
      this.ws!.send(line);
    } else {
      this.outbox.push(line);
      this.view.note('not connected - message buffered', 'info');
    }
  }

  close(): void {
    this.closedByUser = true;
    if (this.reconnectTimer !== null) clearTimeout(this.reconnectTimer);
    this.ws?.close();
  }
}
