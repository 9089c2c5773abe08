import { describe, expect, it } from "vitest";

import {
  OPTION_BOUNDS,
  clampOption,
  defaultOptions,
  defaultState,
  optionsFromRequest,
  toQueryRequest,
} from "../src/state.js";

describe("advanced option round trip", () => {
  it("maps every option to exactly one override field and back", () => {
    const state = defaultState();
    state.question = "what company created the macintosh?";
    state.options = {
      max_documents: 7,
      relsnip_enabled: false,
      k_frag: 42,
      n: 3,
      expansion_enabled: true,
      k_thresh: 0.35,
      top_n: 9,
      stride: 256,
      top_k: 2,
    };
    const request = toQueryRequest(state);
    expect(optionsFromRequest(request)).toEqual(state.options);
  });

  it("defaults survive the round trip too", () => {
    const request = toQueryRequest(defaultState());
    expect(optionsFromRequest(request)).toEqual(defaultOptions());
  });

  it("emits only documented request fields", () => {
    const request = toQueryRequest(defaultState()) as Record<string, unknown>;
    expect(new Set(Object.keys(request))).toEqual(
      new Set(["question", "max_documents", "relsnip", "expansion", "reader"]),
    );
    expect(new Set(Object.keys(request.relsnip as object))).toEqual(
      new Set(["enabled", "k_frag", "n"]),
    );
    expect(new Set(Object.keys(request.expansion as object))).toEqual(
      new Set(["enabled", "k_thresh", "top_n"]),
    );
    expect(new Set(Object.keys(request.reader as object))).toEqual(
      new Set(["stride", "top_k"]),
    );
  });
});

describe("modes", () => {
  it("closed mode sends the passage as context", () => {
    const state = defaultState();
    state.question = "who?";
    state.mode = "closed";
    state.passage = "steve founded apple";
    expect(toQueryRequest(state).context).toBe("steve founded apple");
  });

  it("open mode sends no context", () => {
    const state = defaultState();
    state.question = "who?";
    expect("context" in toQueryRequest(state)).toBe(false);
  });
});

describe("option bounds", () => {
  it("mirror the server config bounds", () => {
    expect(OPTION_BOUNDS.k_thresh).toMatchObject({ min: 0, max: 1 });
    expect(OPTION_BOUNDS.max_documents.min).toBe(1);
    expect(OPTION_BOUNDS.k_frag.min).toBe(1);
    expect(OPTION_BOUNDS.n.min).toBe(1);
    expect(OPTION_BOUNDS.top_n.min).toBe(1);
    expect(OPTION_BOUNDS.stride.min).toBe(1);
    expect(OPTION_BOUNDS.stride.max).toBe(512); // reader max_tokens default
    expect(OPTION_BOUNDS.top_k.min).toBe(1);
  });

  it("clamps out-of-range and non-numeric values", () => {
    expect(clampOption("k_thresh", 1.5)).toBe(1);
    expect(clampOption("k_thresh", -0.2)).toBe(0);
    expect(clampOption("max_documents", 0)).toBe(1);
    expect(clampOption("stride", Number.NaN)).toBe(1);
  });
});
