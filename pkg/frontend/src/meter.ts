import type { MeterView, StrengthVerdict } from "./types.js";

export interface MeterDeps {
  /** POSTs one password to the strength service. */
  post: (password: string) => Promise<StrengthVerdict>;
  /** Receives every view update. */
  render: (view: MeterView) => void;
  setTimer?: (fn: () => void, ms: number) => unknown;
  clearTimer?: (handle: unknown) => void;
  debounceMs?: number;
}

export const DEFAULT_DEBOUNCE_MS = 150;

/**
 * Debounced, ordering-safe driver for the strength meter.
 *
 * The current input lives only in memory. Requests carry monotonically
 * increasing ids; a response is applied only when it is newer than anything
 * already rendered and still matches the text in the box, so stale responses
 * can never describe a password the user is no longer typing. At most one
 * request is in flight; when the input changes mid-request the latest text
 * is queued and sent as soon as the active request settles.
 */
export class MeterController {
  private input = "";
  private requestSeq = 0;
  private appliedSeq = 0;
  private inFlight = false;
  private queued = false;
  private pendingTimer: unknown = null;
  private readonly post: MeterDeps["post"];
  private readonly render: MeterDeps["render"];
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private readonly clearTimer: (handle: unknown) => void;
  private readonly debounceMs: number;

  constructor(deps: MeterDeps) {
    this.post = deps.post;
    this.render = deps.render;
    this.setTimer = deps.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    this.clearTimer = deps.clearTimer ?? ((h) => clearTimeout(h as number));
    this.debounceMs = deps.debounceMs ?? DEFAULT_DEBOUNCE_MS;
    this.render({ status: "idle", verdict: null, requestInFlight: false });
  }

  onInputChange(text: string): void {
    this.input = text;
    if (this.pendingTimer !== null) {
      this.clearTimer(this.pendingTimer);
      this.pendingTimer = null;
    }
    if (text === "") {
      this.queued = false;
      this.render({ status: "idle", verdict: null, requestInFlight: this.inFlight });
      return;
    }
    this.render({ status: "waiting", verdict: null, requestInFlight: this.inFlight });
    this.pendingTimer = this.setTimer(() => {
      this.pendingTimer = null;
      this.fire();
    }, this.debounceMs);
  }

  private fire(): void {
    if (this.input === "") {
      return;
    }
    if (this.inFlight) {
      this.queued = true; // latest input wins once the active request settles
      return;
    }
    const id = ++this.requestSeq;
    const text = this.input;
    this.inFlight = true;
    this.post(text).then(
      (verdict) => this.settle(id, text, verdict, false),
      () => this.settle(id, text, null, true),
    );
  }

  private settle(id: number, text: string, verdict: StrengthVerdict | null,
                 failed: boolean): void {
    this.inFlight = false;
    if (this.queued) {
      this.queued = false;
      if (this.input !== "" && this.pendingTimer === null) {
        this.fire();
      }
    }
    if (id <= this.appliedSeq || text !== this.input) {
      return; // stale: a newer verdict is on screen or the input moved on
    }
    this.appliedSeq = id;
    if (failed) {
      this.render({ status: "offline", verdict: null, requestInFlight: this.inFlight });
    } else {
      this.render({ status: "rated", verdict, requestInFlight: this.inFlight });
    }
  }
}
