/** DOM bootstrap: wires the four work areas (query form, flagged blocks,
 * vote ranking, document viewer) to the search API. */

import { ApiError, SearchApi } from "./api.js";
import {
  renderBlockList,
  renderDocumentText,
  renderErrorBanner,
  renderRanking,
} from "./render.js";
import {
  canSubmit,
  initialState,
  queryFailed,
  querySucceeded,
  selectDocument,
  setParameters,
  setQueryText,
  submitStarted,
  ViewState,
} from "./state.js";

const api = new SearchApi("");

let state: ViewState = initialState();
let inFlight: AbortController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderAll(): void {
  const submit = el<HTMLButtonElement>("submit");
  submit.disabled = !canSubmit(state) || state.phase === "loading";
  el("banner").innerHTML =
    state.phase === "error" && state.errorMessage
      ? renderErrorBanner(state.errorMessage)
      : "";
  const blocks = el("blocks");
  const ranking = el("ranking");
  if (state.result) {
    blocks.innerHTML = renderBlockList(state.result);
    ranking.innerHTML = renderRanking(state.result);
  } else {
    blocks.innerHTML = `<p class="empty">Run a query to see flagged blocks.</p>`;
    ranking.innerHTML = `<p class="empty">Run a query to see the ranking.</p>`;
  }
  for (const button of ranking.querySelectorAll<HTMLButtonElement>(".doc-link")) {
    button.addEventListener("click", () => {
      void openDocument(button.dataset.docId as string);
    });
  }
}

async function submitQuery(): Promise<void> {
  const text = el<HTMLTextAreaElement>("query-text").value;
  const alpha = Number(el<HTMLInputElement>("alpha").value);
  const maxBlocks = Number(el<HTMLInputElement>("max-blocks").value);
  state = setParameters(setQueryText(state, text), alpha, maxBlocks);
  if (!canSubmit(state)) return;

  inFlight?.abort(); // one in-flight query at a time
  inFlight = new AbortController();
  const started = submitStarted(state);
  state = started.state;
  renderAll();
  try {
    const result = await api.query(text, alpha, maxBlocks, inFlight.signal);
    state = querySucceeded(state, started.token, result);
  } catch (err) {
    if ((err as Error).name === "AbortError") return;
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    state = queryFailed(state, started.token, message);
  }
  renderAll();
}

async function openDocument(docId: string): Promise<void> {
  state = selectDocument(state, docId);
  if (state.selectedDocId !== docId || !state.result) return;
  const viewer = el("viewer");
  try {
    const doc = await api.getDocument(docId);
    const spans = state.result.highlights[docId] ?? [];
    viewer.innerHTML =
      `<h3>${doc.name}</h3>` + renderDocumentText(doc.text ?? "", spans);
  } catch (err) {
    const message =
      err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    viewer.innerHTML = renderErrorBanner(message);
  }
}

export function start(): void {
  el("submit").addEventListener("click", () => void submitQuery());
  el<HTMLTextAreaElement>("query-text").addEventListener("input", () => {
    state = setQueryText(state, el<HTMLTextAreaElement>("query-text").value);
    renderAll();
  });
  renderAll();
}

start();
