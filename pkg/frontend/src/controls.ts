/**
 * Operator input: gamma slider (debounced), arrow-key steps, reset.
 * Pure logic lives here so it can be unit tested without a DOM.
 */

import { ClientMessage, wrapGammaDeg } from './protocol.js';

export const SLIDER_DEBOUNCE_MS = 120;
export const ARROW_STEP_DEG = 5;

export function debounce<T extends unknown[]>(
  fn: (...args: T) => void,
  ms: number,
  schedule: (fn: () => void, ms: number) => ReturnType<typeof setTimeout> =
    (f, m) => setTimeout(f, m),
  cancel: (h: ReturnType<typeof setTimeout>) => void = clearTimeout,
): (...args: T) => void {
  let handle: ReturnType<typeof setTimeout> | null = null;
  return (...args: T) => {
    if (handle !== null) cancel(handle);
    handle = schedule(() => {
      handle = null;
      fn(...args);
    }, ms);
  };
}

export function gammaMessage(deg: number): ClientMessage {
  return { type: 'set_gamma', deg: wrapGammaDeg(deg) };
}

/** Arrow-key steering: left/up increase gamma, right/down decrease. */
export function stepGamma(currentDeg: number, key: string): number | null {
  switch (key) {
    case 'ArrowLeft':
    case 'ArrowUp':
      return wrapGammaDeg(currentDeg + ARROW_STEP_DEG);
    case 'ArrowRight':
    case 'ArrowDown':
      return wrapGammaDeg(currentDeg - ARROW_STEP_DEG);
    default:
      return null;
  }
}

export function resetMessage(x = 0, y = 0, headingDeg = 0): ClientMessage {
  return { type: 'reset', x, y, heading_deg: headingDeg };
}
