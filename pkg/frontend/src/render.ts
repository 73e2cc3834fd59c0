/** HTML rendering for the preview table and status banners.
 *
 * Pure string producers so they can be snapshot-tested without a
 * browser. Only the URL column links out; article body text is never
 * requested, so it can never be rendered.
 */

import { PreviewRow, PreviewView, RESULT_COLUMNS } from "./types.js";

export function escapeHtml(value: unknown): string {
  return String(value)
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;")
    .replaceAll("'", "&#39;");
}

function cell(row: PreviewRow, column: (typeof RESULT_COLUMNS)[number]): string {
  const value = row[column];
  if (value === null || value === undefined) {
    return "<td></td>";
  }
  if (column === "url" || column === "media_url") {
    const href = escapeHtml(value);
    return `<td><a href="${href}" rel="noopener">${href}</a></td>`;
  }
  return `<td>${escapeHtml(value)}</td>`;
}

export function renderHeaderRow(): string {
  return `<tr>${RESULT_COLUMNS.map((c) => `<th>${c}</th>`).join("")}</tr>`;
}

export function renderResults(view: PreviewView): string {
  if (view.total === 0) {
    return '<p class="empty">No results. Adjust the query and try again.</p>';
  }
  const rows = view.rows
    .map((row) => `<tr>${RESULT_COLUMNS.map((c) => cell(row, c)).join("")}</tr>`)
    .join("\n");
  return [
    `<p class="total">${view.total} results</p>`,
    `<p class="download"><a href="${escapeHtml(view.exportUrl)}" download>Download full results (CSV)</a></p>`,
    '<table class="results">',
    `<thead>${renderHeaderRow()}</thead>`,
    `<tbody>${rows}</tbody>`,
    "</table>",
  ].join("\n");
}

export function renderBanner(message: string, kind: "error" | "info" = "error"): string {
  return `<div class="banner ${kind}">${escapeHtml(message)}</div>`;
}
