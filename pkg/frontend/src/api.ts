import type { StrengthVerdict } from "./types.js";

/** Build-time default; override per page load with ?api=<url>. */
export const DEFAULT_BASE_URL = "http://127.0.0.1:8342";

export function resolveBaseUrl(search: string, buildTimeUrl?: string): string {
  const fromQuery = new URLSearchParams(search).get("api");
  return (fromQuery ?? buildTimeUrl ?? DEFAULT_BASE_URL).replace(/\/+$/, "");
}

export function makePoster(baseUrl: string, fetchFn: typeof fetch = fetch) {
  return async (password: string): Promise<StrengthVerdict> => {
    const res = await fetchFn(`${baseUrl}/v1/strength`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ password }),
    });
    if (!res.ok) {
      throw new Error(`strength service returned ${res.status}`);
    }
    return (await res.json()) as StrengthVerdict;
  };
}
