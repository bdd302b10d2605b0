import { makePoster, resolveBaseUrl } from "./api.js";
import { MeterController } from "./meter.js";
import type { MeterView } from "./types.js";

const SEGMENT_FILL = { weak: 1, medium: 2, strong: 3 } as const;

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing #${id}`);
  return el as T;
}

function renderView(view: MeterView): void {
  const segments = [byId("seg-1"), byId("seg-2"), byId("seg-3")];
  const label = byId("meter-label");
  const detail = byId("meter-detail");
  segments.forEach((s) => (s.className = "segment"));
  if (view.status === "rated" && view.verdict) {
    const { level, log10_guess_number, latency_ms } = view.verdict;
    for (let i = 0; i < SEGMENT_FILL[level]; i += 1) {
      segments[i].className = `segment filled ${level}`;
    }
    label.textContent = level;
    label.className = `label ${level}`;
    detail.textContent =
      `~10^${log10_guess_number.toFixed(1)} guesses · ${latency_ms.toFixed(2)} ms`;
  } else if (view.status === "offline") {
    label.textContent = "meter offline";
    label.className = "label offline";
    detail.textContent = "strength service unreachable — input still editable";
  } else if (view.status === "waiting") {
    label.textContent = "…";
    label.className = "label";
    detail.textContent = "";
  } else {
    label.textContent = "";
    label.className = "label";
    detail.textContent = "type a candidate password to rate it";
  }
}

const baseUrl = resolveBaseUrl(window.location.search);
const controller = new MeterController({
  post: makePoster(baseUrl),
  render: renderView,
});

const input = byId<HTMLInputElement>("password-input");
input.addEventListener("input", () => controller.onInputChange(input.value));
input.setAttribute("autocomplete", "off");
byId("service-url").textContent = baseUrl;
