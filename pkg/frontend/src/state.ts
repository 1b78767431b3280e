import type { QueryResponse } from "./types.js";

/** UI state. The app keeps exactly one in-flight query: every submission
 * bumps `requestToken`, and responses carrying a stale token are dropped. */
export interface ViewState {
  queryText: string;
  alpha: number;
  maxBlocks: number;
  phase: "idle" | "loading" | "loaded" | "error";
  result: QueryResponse | null;
  errorMessage: string | null;
  selectedDocId: string | null;
  requestToken: number;
}

export const DEFAULT_ALPHA = 0.05;
export const DEFAULT_MAX_BLOCKS = 50;

export function initialState(): ViewState {
  return {
    queryText: "",
    alpha: DEFAULT_ALPHA,
    maxBlocks: DEFAULT_MAX_BLOCKS,
    phase: "idle",
    result: null,
    errorMessage: null,
    selectedDocId: null,
    requestToken: 0,
  };
}

export function canSubmit(state: ViewState): boolean {
  return state.queryText.trim().length > 0;
}

export function setQueryText(state: ViewState, text: string): ViewState {
  return { ...state, queryText: text };
}

export function setParameters(
  state: ViewState,
  alpha: number,
  maxBlocks: number,
): ViewState {
  return { ...state, alpha, maxBlocks };
}

/** Returns the new state plus the token the response must echo. */
export function submitStarted(state: ViewState): { state: ViewState; token: number } {
  const token = state.requestToken + 1;
  return {
    state: { ...state, phase: "loading", errorMessage: null, requestToken: token },
    token,
  };
}

export function querySucceeded(
  state: ViewState,
  token: number,
  result: QueryResponse,
): ViewState {
  if (token !== state.requestToken) return state; // superseded by a newer query
  return {
    ...state,
    phase: "loaded",
    result,
    errorMessage: null,
    selectedDocId: null,
  };
}

/** Failures keep the previous result visible and raise a banner. */
export function queryFailed(
  state: ViewState,
  token: number,
  message: string,
): ViewState {
  if (token !== state.requestToken) return state;
  return { ...state, phase: "error", errorMessage: message };
}

/** Only documents present in the current ranking can be opened. */
export function selectDocument(state: ViewState, docId: string): ViewState {
  if (!state.result || !state.result.ranking.includes(docId)) return state;
  return { ...state, selectedDocId: docId };
}

export function clearSelection(state: ViewState): ViewState {
  return { ...state, selectedDocId: null };
}
