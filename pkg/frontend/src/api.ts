/**
 * Thin client for the search service. At most one field search is in
 * flight; starting a new one aborts the previous so a slow response can
 * never overwrite a newer one.
 */

import type { GroupSummaryResponse, SearchResponse } from "./types.js";

export class ApiError extends Error {}

/** Thrown (as a DOMException) when a newer search superseded this one. */
export function isAbort(err: unknown): boolean {
  return err instanceof DOMException && err.name === "AbortError";
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    const message =
      body !== null && typeof body.error === "string"
        ? body.error
        : `request failed (${response.status})`;
    throw new ApiError(message);
  }
  return body as T;
}

let inflight: AbortController | null = null;

export async function searchFields(params: URLSearchParams): Promise<SearchResponse> {
  inflight?.abort();
  inflight = new AbortController();
  const query = params.toString();
  return getJson<SearchResponse>(
    query ? `/api/fields?${query}` : "/api/fields",
    inflight.signal,
  );
}

export async function fetchSummary(group: string): Promise<GroupSummaryResponse> {
  const params = new URLSearchParams({ group });
  return getJson<GroupSummaryResponse>(`/api/summary?${params}`);
}
