/**
 * HTML builders for the results pane. Pure string functions: the page
 * shell owns the DOM, these own what goes inside it. All invariant values
 * are rendered exactly as the server sent them.
 */

import type { FieldRow, GroupSummaryResponse, SearchResponse } from "./types.js";
import type { SortKey } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export const COMPLETE_BANNER =
  "Proven complete: every field matching this search is listed.";

const SORTABLE: readonly { key: SortKey; title: string }[] = [
  { key: "rd", title: "rd" },
  { key: "grd", title: "grd" },
  { key: "absdisc", title: "D" },
];

function headerCells(activeSort: SortKey | null): string {
  const sortable = SORTABLE.map(({ key, title }) => {
    const marker = key === activeSort ? " sorted" : "";
    return `<th class="sortable${marker}" data-sort="${key}">${title}</th>`;
  });
  return sortable.join("") + "<th>h</th><th>G</th><th>polynomial</th>";
}

function bodyRow(row: FieldRow): string {
  const group = `<span title="${escapeHtml(row.t_name)}">${escapeHtml(row.group)}</span>`;
  const cells = [
    escapeHtml(row.rd.decimal),
    row.grd === null ? "n/a" : escapeHtml(row.grd.decimal),
    escapeHtml(row.disc),
    row.h === null ? "n/a" : escapeHtml(row.h),
    group,
    escapeHtml(row.poly),
  ];
  return `<tr>${cells.map((c) => `<td>${c}</td>`).join("")}</tr>`;
}

/**
 * Results pane: completeness banner (only when the ledger proved the
 * listing exhaustive), the result table, and a shown-of-total footer.
 */
export function renderResults(response: SearchResponse, activeSort: SortKey | null): string {
  const parts: string[] = [];
  if (response.complete) {
    parts.push(
      `<p class="banner" title="${escapeHtml(response.trace)}">${COMPLETE_BANNER}</p>`,
    );
  } else {
    parts.push(
      `<p class="no-banner">Completeness not proven: ${escapeHtml(response.trace)}</p>`,
    );
  }
  if (response.grh_conditional) {
    parts.push('<p class="grh-note">class numbers are conditional on GRH</p>');
  }
  if (response.rows.length === 0) {
    parts.push('<p class="empty">no fields</p>');
    return parts.join("\n");
  }
  parts.push(
    '<table class="results"><thead><tr>' +
      headerCells(activeSort) +
      "</tr></thead><tbody>" +
      response.rows.map(bodyRow).join("") +
      "</tbody></table>",
  );
  if (response.rows.length < response.total) {
    parts.push(
      `<p class="footer">showing ${response.rows.length} of ${response.total}</p>`,
    );
  } else {
    parts.push(`<p class="footer">${response.total} fields</p>`);
  }
  return parts.join("\n");
}

export function renderError(message: string): string {
  return `<p class="error">${escapeHtml(message)}</p>`;
}

export function renderSummary(summary: GroupSummaryResponse): string {
  const lines: string[] = [
    `<h3>${escapeHtml(summary.label)} <small>${escapeHtml(summary.group)}</small></h3>`,
    `<p>records ${summary.total_records}</p>`,
  ];
  if (summary.min_rd !== null) {
    lines.push(`<p>min rd ${escapeHtml(summary.min_rd.decimal)}</p>`);
  }
  if (summary.min_grd !== null) {
    lines.push(`<p>min grd ${escapeHtml(summary.min_grd.decimal)}</p>`);
  }
  for (const family of summary.families) {
    const mark = family.provable ? "proven complete" : "not proven complete";
    lines.push(
      `<p>family {${family.primes.join(",")}}: ${family.count} (${mark})</p>`,
    );
  }
  if (summary.grd_below !== undefined) {
    const mark = summary.grd_below.provable ? "proven complete" : "not proven complete";
    lines.push(
      `<p>grd &le; ${escapeHtml(summary.grd_below.cut)}: ${summary.grd_below.count} (${mark})</p>`,
    );
  }
  return lines.join("\n");
}
