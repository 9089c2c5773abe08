/** Console state and its mapping onto per-request overrides.
 *
 * Every advanced option corresponds to exactly one override field of the
 * /api/answers request and back (round-trip tested). Options are clamped
 * to the same bounds the server config enforces; sending a request never
 * changes the server configuration.
 */

import type { QueryRequest, QueryResponse } from "./types.js";

export type Mode = "open" | "closed";

export interface AdvancedOptions {
  max_documents: number;
  relsnip_enabled: boolean;
  k_frag: number;
  n: number;
  expansion_enabled: boolean;
  k_thresh: number;
  top_n: number;
  stride: number;
  top_k: number;
}

export interface UiState {
  question: string;
  mode: Mode;
  passage: string; // closed-domain context
  options: AdvancedOptions;
  lastResponse: QueryResponse | null;
}

interface Bound {
  min: number;
  max: number;
  step: number;
}

/** Mirrors the server-side config bounds (upper ends are UI affordances
 * where the server only enforces a lower bound). */
export const OPTION_BOUNDS: Record<keyof Omit<AdvancedOptions, "relsnip_enabled" | "expansion_enabled">, Bound> = {
  max_documents: { min: 1, max: 50, step: 1 },
  k_frag: { min: 1, max: 1000, step: 1 },
  n: { min: 1, max: 50, step: 1 },
  k_thresh: { min: 0, max: 1, step: 0.05 },
  top_n: { min: 1, max: 50, step: 1 },
  stride: { min: 1, max: 512, step: 1 },
  top_k: { min: 1, max: 50, step: 1 },
};

export function defaultOptions(): AdvancedOptions {
  return {
    max_documents: 5,
    relsnip_enabled: true,
    k_frag: 100,
    n: 4,
    expansion_enabled: false,
    k_thresh: 0.5,
    top_n: 5,
    stride: 384,
    top_k: 5,
  };
}

export function defaultState(): UiState {
  return {
    question: "",
    mode: "open",
    passage: "",
    options: defaultOptions(),
    lastResponse: null,
  };
}

export function clampOption(name: keyof typeof OPTION_BOUNDS, value: number): number {
  const bound = OPTION_BOUNDS[name];
  if (Number.isNaN(value)) return bound.min;
  return Math.min(bound.max, Math.max(bound.min, value));
}

/** Build the /api/answers request for the current state. */
export function toQueryRequest(state: UiState): QueryRequest {
  const o = state.options;
  const request: QueryRequest = {
    question: state.question,
    max_documents: o.max_documents,
    relsnip: { enabled: o.relsnip_enabled, k_frag: o.k_frag, n: o.n },
    expansion: { enabled: o.expansion_enabled, k_thresh: o.k_thresh, top_n: o.top_n },
    reader: { stride: o.stride, top_k: o.top_k },
  };
  if (state.mode === "closed") {
    request.context = state.passage;
  }
  return request;
}

/** Inverse of toQueryRequest for the advanced options (round-trip tested). */
export function optionsFromRequest(request: QueryRequest): AdvancedOptions {
  const defaults = defaultOptions();
  return {
    max_documents: request.max_documents ?? defaults.max_documents,
    relsnip_enabled: request.relsnip?.enabled ?? defaults.relsnip_enabled,
    k_frag: request.relsnip?.k_frag ?? defaults.k_frag,
    n: request.relsnip?.n ?? defaults.n,
    expansion_enabled: request.expansion?.enabled ?? defaults.expansion_enabled,
    k_thresh: request.expansion?.k_thresh ?? defaults.k_thresh,
    top_n: request.expansion?.top_n ?? defaults.top_n,
    stride: request.reader?.stride ?? defaults.stride,
    top_k: request.reader?.top_k ?? defaults.top_k,
  };
}
