export type StrengthLevel = "weak" | "medium" | "strong";

export interface StrengthVerdict {
  log10_guess_number: number;
  level: StrengthLevel;
  latency_ms: number;
}

export type MeterStatus =
  | "idle" // empty input, meter cleared
  | "waiting" // debounce or request pending
  | "rated" // verdict on screen matches the current input
  | "offline"; // service unreachable, input still editable

export interface MeterView {
  status: MeterStatus;
  verdict: StrengthVerdict | null;
  requestInFlight: boolean;
}
