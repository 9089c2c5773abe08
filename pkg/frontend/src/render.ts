/** Pure HTML-string renderers for query results.
 *
 * Keeping rendering free of DOM access lets the layout be tested headless:
 * the contract suite feeds recorded API responses through these functions
 * and asserts on the produced markup. main.ts only assigns innerHTML.
 */

import type {
  Answer,
  DocumentHit,
  Expansion,
  Highlight,
  QueryResponse,
  TokenAttribution,
  ViewName,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Token heatmap: background alpha proportional to weight; weight 1.0 is
 * max intensity; zero-weight tokens render plain. Empty attribution lists
 * produce no markup at all. */
export function renderAttributions(attributions: TokenAttribution[]): string {
  if (attributions.length === 0) {
    return "";
  }
  const tokens = attributions
    .map((a) => {
      const token = escapeHtml(a.token);
      if (a.weight <= 0) {
        return `<span class="heat-token">${token}</span>`;
      }
      const alpha = Math.min(1, a.weight).toFixed(3);
      return (
        `<span class="heat-token" style="background-color: rgba(255, 138, 0, ${alpha})">` +
        `${token}</span>`
      );
    })
    .join(" ");
  return `<div class="heatmap">${tokens}</div>`;
}

export function renderAnswer(answer: Answer): string {
  const rank =
    answer.retrieval_rank === null
      ? ""
      : `<span class="muted">retrieved #${answer.retrieval_rank + 1}</span>`;
  return `
<article class="card answer-card">
  <div class="card-head">
    <a class="doc-tag" href="#doc-${escapeHtml(answer.doc_id)}">${escapeHtml(answer.doc_id)}</a>
    <span class="score">${answer.score.toFixed(3)}</span>
    ${rank}
  </div>
  <blockquote class="answer-text">${escapeHtml(answer.text)}</blockquote>
  ${renderAttributions(answer.attributions)}
</article>`;
}

/** Fragment text with <mark> wrapped around the server-provided match
 * offsets; no client-side re-matching. */
export function renderHighlight(highlight: Highlight): string {
  const text = highlight.text;
  const pieces: string[] = [];
  let cursor = 0;
  for (const [start, end] of highlight.matches) {
    if (start < cursor || end > text.length || start > end) {
      continue; // defensive: ignore malformed offsets rather than mis-mark
    }
    pieces.push(escapeHtml(text.slice(cursor, start)));
    pieces.push(`<mark>${escapeHtml(text.slice(start, end))}</mark>`);
    cursor = end;
  }
  pieces.push(escapeHtml(text.slice(cursor)));
  return `<p class="fragment">${pieces.join("")}</p>`;
}

export function renderDocument(doc: DocumentHit): string {
  const title = doc.title ? escapeHtml(doc.title) : escapeHtml(doc.doc_id);
  const highlights = doc.highlights.map(renderHighlight).join("\n");
  return `
<article class="card doc-card" id="doc-${escapeHtml(doc.doc_id)}">
  <div class="card-head">
    <span class="doc-label">D${doc.rank}</span>
    <strong>${title}</strong>
    <span class="muted">${escapeHtml(doc.doc_id)}</span>
    <span class="score">${doc.score.toFixed(3)}</span>
  </div>
  ${highlights}
</article>`;
}

export function renderExpansion(expansion: Expansion): string {
  if (!expansion.enabled && expansion.terms.length === 0) {
    return "";
  }
  const chips = expansion.terms
    .map(
      (t) =>
        `<span class="chip" title="confidence ${t.confidence.toFixed(2)}">` +
        `${escapeHtml(t.token)} <span class="muted">&larr; ${escapeHtml(t.source_token)}</span></span>`,
    )
    .join(" ");
  const empty = expansion.terms.length === 0 ? '<span class="muted">no terms accepted</span>' : "";
  return `
<section class="panel" id="expansion-panel">
  <h2>Query expansion</h2>
  <div>${chips}${empty}</div>
</section>`;
}

export function renderTimings(timings: Record<string, number>): string {
  const cells = Object.entries(timings)
    .map(
      ([stage, ms]) =>
        `<span class="timing"><span class="muted">${escapeHtml(stage.replace("_ms", ""))}</span> ${ms.toFixed(1)} ms</span>`,
    )
    .join(" ");
  return `<section class="panel" id="timings-panel"><h2>Timings</h2><div>${cells}</div></section>`;
}

export function renderWarnings(warnings: string[]): string {
  if (warnings.length === 0) {
    return "";
  }
  const chips = warnings
    .map((w) => `<span class="chip warning-chip">${escapeHtml(w)}</span>`)
    .join(" ");
  return `<div class="warnings">${chips}</div>`;
}

const ALL_VIEWS: ViewName[] = ["documents", "answers", "expansion", "explanations"];

/** Assemble the full results layout. Closed-domain responses (no
 * documents) hide the documents panel; warnings render as chips above
 * everything while the rest of the results stay visible. */
export function renderResults(
  response: QueryResponse,
  visibleViews: ViewName[] = ALL_VIEWS,
): string {
  const sections: string[] = [renderWarnings(response.warnings)];
  if (visibleViews.includes("answers")) {
    const cards = response.answers.map(renderAnswer).join("\n");
    sections.push(
      `<section class="panel" id="answers-panel"><h2>Answers</h2>${
        cards || '<span class="muted">no answer spans found</span>'
      }</section>`,
    );
  }
  if (visibleViews.includes("documents") && response.documents.length > 0) {
    const cards = response.documents.map(renderDocument).join("\n");
    sections.push(
      `<section class="panel" id="documents-panel"><h2>Documents</h2>${cards}</section>`,
    );
  }
  if (visibleViews.includes("expansion")) {
    sections.push(renderExpansion(response.expansion));
  }
  sections.push(renderTimings(response.timings));
  return sections.filter((s) => s).join("\n");
}
