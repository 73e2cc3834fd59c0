/** Thin fetch client for the /api/v1 endpoints. */

import { buildQuery } from "./query.js";
import { FormState, MediaInfo, SearchResponse, TaggerMeta } from "./types.js";

export class ServiceError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`service returned ${status}: ${detail}`);
  }
}

async function getJson<T>(url: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(url, { signal });
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ServiceError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  search(form: FormState, signal?: AbortSignal): Promise<SearchResponse> {
    const query = buildQuery(form);
    const suffix = query === "" ? "" : `?${query}`;
    return getJson<SearchResponse>(`${this.baseUrl}/api/v1/search${suffix}`, signal);
  }

  sources(): Promise<MediaInfo[]> {
    return getJson<MediaInfo[]>(`${this.baseUrl}/api/v1/meta/sources`);
  }

  taggers(): Promise<TaggerMeta> {
    return getJson<TaggerMeta>(`${this.baseUrl}/api/v1/meta/taggers`);
  }

  exportUrl(token: string): string {
    return `${this.baseUrl}/api/v1/export/${encodeURIComponent(token)}`;
  }
}
