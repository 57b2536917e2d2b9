/**
 * Steering console entry point: DOM glue between the connection, the
 * view state and the canvas. Single event loop: network frames land in
 * the bounded queue, the render loop drains it and paints.
 */

import {
  debounce,
  gammaMessage,
  resetMessage,
  SLIDER_DEBOUNCE_MS,
  stepGamma,
} from './controls.js';
import { SteerConnection } from './net.js';
import { ServerMessage, wrapGammaDeg } from './protocol.js';
import { drawFrame } from './render.js';
import {
  parseReplayText,
  ReplayDriver,
  serializeLog,
  stateCount,
} from './replay.js';
import {
  freeArena,
  MessageQueue,
  squareArena,
  straightTaskOverlay,
  turnTaskOverlay,
  ViewState,
} from './viewstate.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const canvas = el<HTMLCanvasElement>('view');
const ctx = canvas.getContext('2d')!;
const banner = el<HTMLDivElement>('banner');
const gammaSlider = el<HTMLInputElement>('gamma');
const gammaReadout = el<HTMLSpanElement>('gamma-readout');
const stateReadout = el<HTMLSpanElement>('state-readout');
const consoleBox = el<HTMLPreElement>('console');
const urlInput = el<HTMLInputElement>('server-url');

const queue = new MessageQueue();
const view = new ViewState(freeArena(1.2, 0.133));
view.overlay = straightTaskOverlay();

let connection: SteerConnection | null = null;
let replayDriver: ReplayDriver | null = null;
let received: ServerMessage[] = [];
let interpolate = false;
let lastStateAt = performance.now();
let statePeriodMs = 500;

function connect(): void {
  connection?.close();
  replayDriver = null;
  received = [];
  view.reset();
  view.banner = null;
  connection = new SteerConnection(urlInput.value, queue, view);
  connection.connect();
}

function send(msg: Parameters<SteerConnection['send']>[0]): void {
  if (view.status === 'replay') {
    view.note('replay mode - controls are disabled', 'info');
    return;
  }
  connection?.send(msg);
}

const sendGammaDebounced = debounce((deg: number) => {
  view.pendingGammaDeg = deg;
  send(gammaMessage(deg));
}, SLIDER_DEBOUNCE_MS);

gammaSlider.addEventListener('input', () => {
  const deg = Number(gammaSlider.value);
  gammaReadout.textContent = `${deg.toFixed(0)} deg`;
  sendGammaDebounced(deg);
});

window.addEventListener('keydown', (ev) => {
  const next = stepGamma(Number(gammaSlider.value), ev.key);
  if (next === null) return;
  ev.preventDefault();
  gammaSlider.value = String(next);
  gammaReadout.textContent = `${next.toFixed(0)} deg`;
  view.pendingGammaDeg = next;
  send(gammaMessage(next)); // key taps send immediately, no debounce
});

el<HTMLButtonElement>('btn-connect').addEventListener('click', connect);
el<HTMLButtonElement>('btn-reset').addEventListener('click', () => {
  view.reset();
  send(resetMessage());
});
el<HTMLButtonElement>('btn-pause').addEventListener('click', () =>
  send({ type: 'pause' }));
el<HTMLButtonElement>('btn-resume').addEventListener('click', () =>
  send({ type: 'resume' }));

el<HTMLSelectElement>('overlay-select').addEventListener('change', (ev) => {
  const value = (ev.target as HTMLSelectElement).value;
  view.overlay =
    value === 'straight' ? straightTaskOverlay() :
    value === 'turn' ? turnTaskOverlay() : [];
});

el<HTMLSelectElement>('scenario-select').addEventListener('change', (ev) => {
  const name = (ev.target as HTMLSelectElement).value;
  view.arena = name === 'boundary_lap'
    ? squareArena(0.6, 0.133)
    : freeArena(1.2, 0.133);
  view.reset();
  send({ type: 'scenario', name });
});

el<HTMLInputElement>('interpolate').addEventListener('change', (ev) => {
  interpolate = (ev.target as HTMLInputElement).checked;
});

el<HTMLButtonElement>('btn-save-log').addEventListener('click', () => {
  const blob = new Blob([serializeLog(received)],
                        { type: 'application/x-ndjson' });
  const a = document.createElement('a');
  a.href = URL.createObjectURL(blob);
  a.download = 'session_log.ndjson';
  a.click();
  URL.revokeObjectURL(a.href);
});

el<HTMLInputElement>('replay-file').addEventListener('change', async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  const parsed = parseReplayText(await file.text());
  if (stateCount(parsed) === 0) {
    view.note(
      'no state lines in file - server recordings must be converted ' +
      'with scripts/recording_to_statelog.py', 'info');
    return;
  }
  connection?.close();
  connection = null;
  view.reset();
  view.status = 'replay';
  view.banner = `replaying ${file.name} (${stateCount(parsed)} states)`;
  replayDriver = new ReplayDriver(parsed, (m) => view.apply(m));
});

function renderConsole(): void {
  const lines = view.log.slice(-12).map((e) =>
    (e.dir === 'sent' ? '> ' : e.dir === 'recv' ? '< ' : '. ') + e.text);
  consoleBox.textContent = lines.join('\n');
}

function tick(now: number): void {
  if (replayDriver) {
    // one state per animation frame: a slow, honest replay cadence
    if (!replayDriver.done) replayDriver.stepToNextState();
  } else {
    for (const msg of queue.drain(64)) {
      if (msg.type === 'state') {
        const dt = now - lastStateAt;
        if (dt > 0) statePeriodMs = 0.7 * statePeriodMs + 0.3 * dt;
        lastStateAt = now;
        received.push(msg);
        view.apply(msg);
      } else {
        received.push(msg);
        view.apply(msg);
      }
    }
  }
  banner.textContent = view.banner ?? '';
  banner.style.display = view.banner ? 'block' : 'none';
  if (view.current) {
    const s = view.current;
    stateReadout.textContent =
      `k=${s.k}  t=${s.t.toFixed(1)}s  x=${s.x.toFixed(3)}  ` +
      `y=${s.y.toFixed(3)}  heading=${s.heading_deg.toFixed(1)} deg  ` +
      `gamma=${s.gamma_deg.toFixed(1)} deg  ` +
      `contact=${s.contact ?? '-'}  [${view.status}]`;
  } else {
    stateReadout.textContent = `[${view.status}]`;
  }
  renderConsole();
  const tween = interpolate
    ? Math.min((now - lastStateAt) / Math.max(statePeriodMs, 1), 1)
    : 1;
  drawFrame(ctx, view, { interpolate, tween });
  requestAnimationFrame(tick);
}

gammaSlider.value = '0';
gammaReadout.textContent = '0 deg';
urlInput.value = `ws://${location.hostname || '127.0.0.1'}:8770`;
connect();
requestAnimationFrame(tick);

// keep the slider honest against arrow-key wrapping
setInterval(() => {
  if (view.pendingGammaDeg === null && view.current) {
    const deg = wrapGammaDeg(view.current.gamma_deg);
    if (Math.abs(deg - Number(gammaSlider.value)) > 0.5) {
      gammaSlider.value = String(deg);
      gammaReadout.textContent = `${deg.toFixed(0)} deg`;
    }
  }
}, 500);
