/** Pure HTML renderers. Strings in, strings out; main.ts owns the DOM.
 * Grid rows render exactly in server order - the client never re-sorts. */

import type { ChatState } from "./state.js";
import type {
  EntropyDebug,
  GridItem,
  GridPayload,
  ItemDetail,
  QuestionPayload,
} from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

export function renderMessages(state: ChatState): string {
  const bubbles = state.messages
    .map(
      (m) =>
        `<div class="bubble ${m.role}"><span class="who">${m.role}</span>` +
        `<p>${escapeHtml(m.text)}</p></div>`,
    )
    .join("");
  return `<div class="messages">${bubbles}</div>`;
}

/** The "why this question" panel: the distribution context the agent is
 * quoting, plus per-dimension uncertainty when debug data is present. */
export function renderQuestionPanel(
  question: QuestionPayload,
  debug: EntropyDebug | null,
): string {
  let rows = "";
  if (debug) {
    const sorted = [...debug.dimensions].sort((a, b) => b.normalized - a.normalized);
    rows = sorted
      .slice(0, 5)
      .map(
        (d) =>
          `<tr><td>${escapeHtml(d.dimension)}</td>` +
          `<td>${d.normalized.toFixed(3)}</td>` +
          `<td>${d.distinct_values}</td></tr>`,
      )
      .join("");
    rows = `<table class="entropy"><thead><tr><th>dimension</th><th>H_norm</th><th>values</th></tr></thead><tbody>${rows}</tbody></table>`;
  }
  return (
    `<aside class="why" data-dimension="${escapeHtml(question.dimension)}">` +
    `<h3>Why this question</h3>` +
    `<p>Asking about <strong>${escapeHtml(question.dimension)}</strong>: ` +
    `${escapeHtml(question.distribution_context)}</p>${rows}</aside>`
  );
}

export function renderRelaxedBanner(relaxed: string[]): string {
  if (relaxed.length === 0) return "";
  const names = relaxed.map((d) => `<code>${escapeHtml(d)}</code>`).join(", ");
  return (
    `<div class="banner relaxed" role="status">Some of your criteria could not ` +
    `be fully met; these were relaxed: ${names}</div>`
  );
}

function itemCard(item: GridItem, detail: ItemDetail | undefined): string {
  const attrs = Object.entries(item.attributes)
    .filter(([, v]) => v !== null)
    .slice(0, 6)
    .map(([k, v]) => `<span class="attr"><em>${escapeHtml(k)}</em> ${escapeHtml(v)}</span>`)
    .join("");
  const pros = (detail?.pros ?? [])
    .slice(0, 2)
    .map((p) => `<li class="pro">${escapeHtml(p)}</li>`)
    .join("");
  const cons = (detail?.cons ?? [])
    .slice(0, 1)
    .map((c) => `<li class="con">${escapeHtml(c)}</li>`)
    .join("");
  return (
    `<button class="card" data-item-id="${escapeHtml(item.id)}">` +
    `<span class="id">${escapeHtml(item.id)}</span>` +
    `<span class="score">score ${item.score.toFixed(3)} · #${item.rank}</span>` +
    `<span class="attrs">${attrs}</span>` +
    `<ul class="snippets">${pros}${cons}</ul></button>`
  );
}

export function renderGrid(
  grid: GridPayload,
  itemsDetail: Record<string, ItemDetail>,
): string {
  const caption = grid.dimension
    ? `grouped by <strong>${escapeHtml(grid.dimension)}</strong>`
    : "top matches";
  const rows = grid.rows
    .map(
      (row) =>
        `<section class="grid-row"><h3>${escapeHtml(row.label)}</h3><div class="cards">` +
        row.items.map((item) => itemCard(item, itemsDetail[item.id])).join("") +
        `</div></section>`,
    )
    .join("");
  return `<div class="grid" data-dimension="${escapeHtml(grid.dimension ?? "")}"><p class="caption">${caption}</p>${rows}</div>`;
}

export function renderDrawer(itemId: string, detail: ItemDetail | undefined): string {
  if (!detail) return "";
  const pros = detail.pros.map((p) => `<li class="pro">${escapeHtml(p)}</li>`).join("");
  const cons = detail.cons.map((c) => `<li class="con">${escapeHtml(c)}</li>`).join("");
  const matched =
    detail.matched_likes.length > 0
      ? `<p class="matched">Matches what you asked for: ` +
        detail.matched_likes.map((m) => `<mark>${escapeHtml(m)}</mark>`).join(", ") +
        `</p>`
      : "";
  return (
    `<aside class="drawer" data-item-id="${escapeHtml(itemId)}">` +
    `<button class="close" data-action="close-drawer">×</button>` +
    `<h3>${escapeHtml(itemId)}</h3>` +
    `<p>${escapeHtml(detail.description)}</p>${matched}` +
    `<h4>Pros</h4><ul>${pros}</ul><h4>Cons</h4><ul>${cons}</ul></aside>`
  );
}

export function renderApp(state: ChatState): string {
  const parts: string[] = [];
  parts.push(
    `<header><h1>askrec</h1><span class="session">strategy ${escapeHtml(state.strategy)}` +
      ` · up to ${state.maxQuestions} questions</span></header>`,
  );
  if (state.error) parts.push(`<div class="banner error">${escapeHtml(state.error)}</div>`);
  if (state.notice) parts.push(`<div class="banner notice">${escapeHtml(state.notice)}</div>`);
  parts.push(renderRelaxedBanner(state.relaxed));
  parts.push(renderMessages(state));
  if (state.pendingQuestion) {
    parts.push(renderQuestionPanel(state.pendingQuestion, state.entropyDebug));
  }
  if (state.grid) parts.push(renderGrid(state.grid, state.itemsDetail));
  if (state.drawerItemId) {
    parts.push(renderDrawer(state.drawerItemId, state.itemsDetail[state.drawerItemId]));
  }
  const disabled = state.busy || state.done || state.sessionId === null ? "disabled" : "";
  const placeholder = state.done
    ? "session finished - start a new one"
    : "Describe what you are looking for...";
  parts.push(
    `<form id="composer"><input id="composer-input" type="text" ${disabled} ` +
      `placeholder="${placeholder}" autocomplete="off">` +
      `<button type="submit" ${disabled}>Send</button></form>`,
  );
  return parts.join("\n");
}
