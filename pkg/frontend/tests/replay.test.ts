import { describe, expect, it } from 'vitest';

import { StateMsg } from '../src/protocol.js';
import {
  parseReplayText,
  ReplayDriver,
  serializeLog,
  stateCount,
} from '../src/replay.js';
import { ViewState } from '../src/viewstate.js';

function state(k: number): StateMsg {
  return {
    type: 'state', k, t: k * 2.0, x: 0.05 * k, y: 0.01 * k,
    heading_deg: 15 * k, gamma_deg: 120, contact: k === 3 ? 'right' : null,
  };
}

function sampleLogText(): string {
  const lines = [
    JSON.stringify(state(0)),
    JSON.stringify({ type: 'ack', of: 'set_gamma', applied_at_k: 0 }),
    JSON.stringify(state(1)),
    'not json at all',
    JSON.stringify(state(2)),
    JSON.stringify({ type: 'verdict', kind: 'avoidance', ok: true }),
    JSON.stringify(state(3)),
    '',
  ];
  return lines.join('\n');
}

describe('parseReplayText', () => {
  it('collects protocol messages and counts skipped lines', () => {
    const parsed = parseReplayText(sampleLogText());
    expect(parsed.messages.length).toBe(6);
    expect(parsed.skipped).toBe(1);
    expect(stateCount(parsed)).toBe(4);
  });

  it('round-trips through serializeLog', () => {
    const parsed = parseReplayText(sampleLogText());
    const again = parseReplayText(serializeLog(parsed.messages));
    expect(again.messages).toEqual(parsed.messages);
    expect(again.skipped).toBe(0);
  });
});

describe('ReplayDriver', () => {
  it('produces a trail identical to applying the live stream', () => {
    const parsed = parseReplayText(sampleLogText());

    const live = new ViewState();
    for (const msg of parsed.messages) live.apply(msg);

    const replayed = new ViewState();
    const driver = new ReplayDriver(parsed, (m) => replayed.apply(m));
    driver.runAll();

    expect(replayed.trail.toArray()).toEqual(live.trail.toArray());
    expect(replayed.current).toEqual(live.current);
    expect(replayed.verdicts).toEqual(live.verdicts);
  });

  it('stepToNextState lands on state messages', () => {
    const parsed = parseReplayText(sampleLogText());
    const view = new ViewState();
    const driver = new ReplayDriver(parsed, (m) => view.apply(m));
    const first = driver.stepToNextState();
    expect(first!.k).toBe(0);
    const second = driver.stepToNextState();
    expect(second!.k).toBe(1);
    driver.runAll();
    expect(driver.done).toBe(true);
    expect(view.trail.length).toBe(4);
  });
});
