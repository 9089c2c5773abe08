/** Thin client for the REST API with single-flight semantics: submitting
 * a new query aborts the one in flight, so a slow older response can
 * never render over a newer one. */

import { QUERY_RESPONSE_SCHEMA, validate } from "./schema.js";
import type { QueryRequest, QueryResponse } from "./types.js";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
  }
}

export class QueryClient {
  private pending: AbortController | null = null;

  constructor(private readonly baseUrl: string = "") {}

  async submit(request: QueryRequest): Promise<QueryResponse> {
    this.pending?.abort();
    const controller = new AbortController();
    this.pending = controller;
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}/api/answers`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(request),
        signal: controller.signal,
      });
    } catch (error) {
      if (controller.signal.aborted) {
        throw new ApiError("superseded by a newer query");
      }
      throw new ApiError(`service unreachable: ${String(error)}`);
    } finally {
      if (this.pending === controller) {
        this.pending = null;
      }
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      const detail = body && "detail" in body ? JSON.stringify(body.detail) : response.statusText;
      throw new ApiError(`request failed (${response.status}): ${detail}`, response.status);
    }
    const violations = validate(body, QUERY_RESPONSE_SCHEMA);
    if (violations.length > 0) {
      throw new ApiError(`response does not match the documented schema: ${violations[0]}`);
    }
    return body as QueryResponse;
  }

  async fetchConfig(): Promise<Record<string, unknown>> {
    const response = await fetch(`${this.baseUrl}/api/config`);
    if (!response.ok) {
      throw new ApiError(`config fetch failed (${response.status})`, response.status);
    }
    return (await response.json()) as Record<string, unknown>;
  }
}
