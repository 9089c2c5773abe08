/** DOM bootstrap: wires the form and advanced panel to the query client
 * and renders results. All layout generation lives in render.ts. */

import { ApiError, QueryClient } from "./api.js";
import {
  OPTION_BOUNDS,
  UiState,
  clampOption,
  defaultState,
  toQueryRequest,
} from "./state.js";
import { renderResults } from "./render.js";
import type { ViewName } from "./types.js";

const state: UiState = defaultState();
const client = new QueryClient();
let visibleViews: ViewName[] = ["documents", "answers", "expansion", "explanations"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(message: string | null): void {
  const banner = el<HTMLDivElement>("error-banner");
  banner.textContent = message ?? "";
  banner.hidden = message === null;
}

function readNumber(id: string, option: keyof typeof OPTION_BOUNDS): number {
  const input = el<HTMLInputElement>(id);
  const clamped = clampOption(option, Number(input.value));
  input.value = String(clamped);
  return clamped;
}

function collectState(): void {
  state.question = el<HTMLInputElement>("question").value;
  state.mode = el<HTMLInputElement>("mode-closed").checked ? "closed" : "open";
  state.passage = el<HTMLTextAreaElement>("passage").value;
  state.options = {
    max_documents: readNumber("opt-max-documents", "max_documents"),
    relsnip_enabled: el<HTMLInputElement>("opt-relsnip").checked,
    k_frag: readNumber("opt-k-frag", "k_frag"),
    n: readNumber("opt-n", "n"),
    expansion_enabled: el<HTMLInputElement>("opt-expansion").checked,
    k_thresh: readNumber("opt-k-thresh", "k_thresh"),
    top_n: readNumber("opt-top-n", "top_n"),
    stride: readNumber("opt-stride", "stride"),
    top_k: readNumber("opt-top-k", "top_k"),
  };
}

function syncModePanels(): void {
  const closed = el<HTMLInputElement>("mode-closed").checked;
  el<HTMLDivElement>("passage-row").hidden = !closed;
}

async function submit(event: Event): Promise<void> {
  event.preventDefault();
  collectState();
  if (!state.question.trim()) {
    showError("enter a question first");
    return;
  }
  showError(null);
  const button = el<HTMLButtonElement>("submit");
  button.disabled = true;
  try {
    const response = await client.submit(toQueryRequest(state));
    state.lastResponse = response;
    el<HTMLDivElement>("results").innerHTML = renderResults(response, visibleViews);
  } catch (error) {
    if (error instanceof ApiError && error.message.includes("superseded")) {
      return; // a newer query is in flight; keep current render
    }
    showError(error instanceof Error ? error.message : String(error));
  } finally {
    button.disabled = false;
  }
}

async function boot(): Promise<void> {
  el<HTMLFormElement>("query-form").addEventListener("submit", submit);
  el<HTMLInputElement>("mode-open").addEventListener("change", syncModePanels);
  el<HTMLInputElement>("mode-closed").addEventListener("change", syncModePanels);
  syncModePanels();
  try {
    const config = (await client.fetchConfig()) as {
      ui?: { title?: string; description?: string; views_visible?: ViewName[] };
    };
    if (config.ui?.title) {
      document.title = config.ui.title;
      el<HTMLHeadingElement>("app-title").textContent = config.ui.title;
    }
    if (config.ui?.description) {
      el<HTMLParagraphElement>("app-description").textContent = config.ui.description;
    }
    if (config.ui?.views_visible) {
      visibleViews = config.ui.views_visible;
    }
  } catch {
    // config endpoint is cosmetic here; the console still works without it
  }
}

boot();
