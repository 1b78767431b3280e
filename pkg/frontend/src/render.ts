import { highlightCharSpans } from "./spans.js";
import type { ByteSpan, QueryResponse } from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Flagged-block pane: one row per block, best (lowest) distance first. */
export function renderBlockList(result: QueryResponse): string {
  if (result.flagged.length === 0) {
    return `<p class="empty">No blocks flagged.</p>`;
  }
  const rows = result.flagged
    .map(
      (f) =>
        `<tr><td>${f.ncd.toFixed(4)}</td>` +
        `<td>${escapeHtml(f.doc_id)}</td>` +
        `<td>${f.bin}KB</td><td>block ${f.ordinal}</td>` +
        `<td>[${f.start}, ${f.end})</td></tr>`,
    )
    .join("");
  return (
    `<table class="blocks"><thead><tr>` +
    `<th>NCD</th><th>file</th><th>database</th><th>position</th><th>bytes</th>` +
    `</tr></thead><tbody>${rows}</tbody></table>`
  );
}

/** Ranking pane: documents by descending votes; rows carry data-doc-id so
 * the app can open the viewer. */
export function renderRanking(result: QueryResponse): string {
  if (result.ranking.length === 0) {
    return `<p class="empty">No documents retrieved.</p>`;
  }
  const rows = result.ranking
    .map(
      (docId) =>
        `<li><button type="button" class="doc-link" data-doc-id="${escapeHtml(
          docId,
        )}">${escapeHtml(docId)}</button>` +
        `<span class="votes">${result.votes[docId] ?? 0} votes</span></li>`,
    )
    .join("");
  return `<ol class="ranking">${rows}</ol>`;
}

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}

/** Full-document viewer with flagged regions wrapped in <mark>.  Overlapping
 * byte spans are merged before rendering, so marks never nest. */
export function renderDocumentText(
  text: string,
  byteSpans: readonly ByteSpan[],
): string {
  const spans = highlightCharSpans(text, byteSpans);
  const parts: string[] = [];
  let cursor = 0;
  for (const { start, end } of spans) {
    parts.push(escapeHtml(text.slice(cursor, start)));
    parts.push(`<mark>${escapeHtml(text.slice(start, end))}</mark>`);
    cursor = end;
  }
  parts.push(escapeHtml(text.slice(cursor)));
  return `<pre class="doc-text">${parts.join("")}</pre>`;
}
