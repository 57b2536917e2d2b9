/**
 * Offline replay: load a saved session log (newline-delimited JSON of
 * server messages) and feed it through the same reducer as a live
 * session, so the trail is identical to what the live view showed.
 *
 * The "save log" button downloads exactly what was received; server-side
 * recordings (which store inbound commands, not states) convert to this
 * format with scripts/recording_to_statelog.py.
 */

import { parseServerMessage, ServerMessage, StateMsg } from './protocol.js';

export interface ReplayFile {
  messages: ServerMessage[];
  skipped: number; // unparsable or non-protocol lines
}

export function parseReplayText(text: string): ReplayFile {
  const messages: ServerMessage[] = [];
  let skipped = 0;
  for (const raw of text.split('\n')) {
    const line = raw.trim();
    if (!line) continue;
    const msg = parseServerMessage(line);
    if (msg) {
      messages.push(msg);
    } else {
      skipped += 1;
    }
  }
  return { messages, skipped };
}

export function stateCount(file: ReplayFile): number {
  return file.messages.filter((m) => m.type === 'state').length;
}

export function serializeLog(messages: readonly ServerMessage[]): string {
  return messages.map((m) => JSON.stringify(m)).join('\n') + '\n';
}

/** Steps through a replay file one message at a time. */
export class ReplayDriver {
  private index = 0;

  constructor(readonly file: ReplayFile,
              readonly apply: (msg: ServerMessage) => void) {}

  get done(): boolean {
    return this.index >= this.file.messages.length;
  }

  get position(): number {
    return this.index;
  }

  stepOne(): ServerMessage | null {
    if (this.done) return null;
    const msg = this.file.messages[this.index];
    this.index += 1;
    this.apply(msg);
    return msg;
  }

  /** Apply messages up to and including the next state message. */
  stepToNextState(): StateMsg | null {
    while (!this.done) {
      const msg = this.stepOne();
      if (msg && msg.type === 'state') return msg;
    }
    return null;
  }

  runAll(): void {
    while (!this.done) this.stepOne();
  }
}
