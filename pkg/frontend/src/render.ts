/** Pure HTML-string renderers.
 *
 * Everything here is a function from data to markup with no DOM access, so
 * the test suite can assert on output without a browser. app.ts owns the
 * document and event wiring.
 */

import { CANONICAL_DISCLAIMER } from "./disclaimer.js";
import { rawLiteral } from "./rawjson.js";
import type { MetricsView, PanelView } from "./state.js";
import { filterTag } from "./state.js";
import type {
  AuditEventDoc,
  AuditReportDoc,
  Badge,
  BocDoc,
  DriftPoint,
  Filter,
  LedgerVerdict,
  MetricItem,
  ReportSummary,
  ServiceSummary,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function escapeAttr(text: string): string {
  return escapeHtml(text).replace(/'/g, "&#39;");
}

/** The banner every metrics view carries. The text must match the string
 * embedded in reports byte for byte; both come from the same constant. */
export function renderDisclaimer(): string {
  return `<p class="disclaimer" role="note">${escapeHtml(CANONICAL_DISCLAIMER)}</p>`;
}

export function renderFilterRail(active: Filter, knownAttributes: string[]): string {
  const chips = Object.keys(active)
    .sort()
    .map(
      (name) =>
        `<li class="filter-chip">` +
        `<span>${escapeHtml(name)} = ${escapeHtml(active[name]!)}</span> ` +
        `<button type="button" data-action="remove-filter" data-name="${escapeAttr(name)}" ` +
        `aria-label="remove filter ${escapeAttr(name)}">x</button></li>`
    )
    .join("");
  const options = knownAttributes
    .map((name) => `<option value="${escapeAttr(name)}">${escapeHtml(name)}</option>`)
    .join("");
  return (
    `<nav class="filter-rail" aria-label="slice filters">` +
    `<h2>Filters</h2>` +
    `<ul class="active-filters">${chips}</ul>` +
    `<form data-action="add-filter">` +
    `<label>Attribute <select name="attribute">${options}</select></label>` +
    `<label>Value <input name="value" type="text"></label>` +
    `<button type="submit">Apply</button>` +
    `</form>` +
    (Object.keys(active).length > 0
      ? `<button type="button" data-action="clear-filters">Clear all</button>`
      : "") +
    `</nav>`
  );
}

function describeFilter(filter: Filter): string {
  const tag = filterTag(filter);
  return tag === "" ? "whole population" : tag;
}

/** One metric card. Numeric values are copied from the raw response text,
 * not re-serialized, so what the API said is what the page shows. */
function renderMetricCard(raw: string, index: number, item: MetricItem): string {
  const rows: string[] = [];
  const groups = item.group_values ?? {};
  for (const group of Object.keys(groups).sort()) {
    const literal = rawLiteral(raw, ["results", index, "group_values", group]);
    rows.push(
      `<tr><th scope="row">${escapeHtml(group)}</th>` +
        `<td class="value">${escapeHtml(literal)}</td></tr>`
    );
  }
  const summary: string[] = [];
  if (item.gap !== undefined) {
    summary.push(
      `<dt>gap</dt><dd class="value">${escapeHtml(rawLiteral(raw, ["results", index, "gap"]))}</dd>`
    );
  }
  if (item.ratio !== undefined) {
    summary.push(
      `<dt>ratio</dt><dd class="value">${escapeHtml(rawLiteral(raw, ["results", index, "ratio"]))}</dd>`
    );
  }
  const notes: string[] = [];
  if (item.status !== "ok") {
    notes.push(`<p class="metric-status">status: ${escapeHtml(item.status)}</p>`);
  }
  const details = item.details as { low_support_groups?: string[] } | undefined;
  if (details?.low_support_groups !== undefined && details.low_support_groups.length > 0) {
    notes.push(
      `<p class="low-support">low support: ${escapeHtml(details.low_support_groups.join(", "))}</p>`
    );
  }
  const heading =
    item.attribute === null
      ? escapeHtml(item.criterion)
      : `${escapeHtml(item.criterion)} by ${escapeHtml(item.attribute)}`;
  return (
    `<article class="metric-card">` +
    `<h3>${heading}</h3>` +
    `<table><tbody>${rows.join("")}</tbody></table>` +
    `<dl class="metric-summary">${summary.join("")}</dl>` +
    notes.join("") +
    `</article>`
  );
}

function renderSliceChips(slices: Filter[]): string {
  const chips = slices.map((slice) => {
    const tag = filterTag(slice);
    return (
      `<li><button type="button" data-action="use-slice" data-slice="${escapeAttr(tag)}">` +
      `${escapeHtml(describeFilter(slice))}</button></li>`
    );
  });
  return `<ul class="available-slices">${chips.join("")}</ul>`;
}

export function renderMetricsPanel(view: MetricsView): string {
  const banner = renderDisclaimer();
  const caption = `<p class="slice-caption">Slice: ${escapeHtml(describeFilter(view.filter))}</p>`;
  if (view.kind === "loading") {
    return `<section class="metrics">${banner}${caption}<p class="loading">Loading metrics...</p></section>`;
  }
  if (view.kind === "error") {
    return (
      `<section class="metrics">${banner}${caption}` +
      `<div class="error-state" role="alert">` +
      `<p>Could not reach the registry: ${escapeHtml(view.message)}</p>` +
      `<button type="button" data-action="retry-metrics">Retry</button>` +
      `</div></section>`
    );
  }
  if (view.kind === "not_computed") {
    const body = view.body;
    const alternatives =
      body.available_criteria !== undefined
        ? `<p>Criteria evaluated in the latest report:</p>` +
          `<ul class="available-criteria">${body.available_criteria
            .map(
              (c) =>
                `<li><button type="button" data-action="use-criterion" ` +
                `data-criterion="${escapeAttr(c)}">${escapeHtml(c)}</button></li>`
            )
            .join("")}</ul>`
        : `<p>Slices available in the latest report:</p>` +
          renderSliceChips(body.available_slices ?? []);
    return (
      `<section class="metrics">${banner}${caption}` +
      `<div class="not-computed">` +
      `<p>${escapeHtml(body.reason ?? "this slice was not computed")}</p>` +
      alternatives +
      `</div></section>`
    );
  }
  const body = view.body;
  const count = rawLiteral(view.raw, ["user_count"]);
  const cards = (body.results ?? []).map((item, i) => renderMetricCard(view.raw, i, item));
  return (
    `<section class="metrics">${banner}${caption}` +
    `<p class="user-count">user_count: <span class="value">${escapeHtml(count)}</span></p>` +
    cards.join("") +
    `</section>`
  );
}

const BADGE_TEXT: Record<Badge["status"], string> = {
  compliant: "Compliant",
  stale: "Report overdue",
  audit_discrepancy: "Audit discrepancy",
  not_certified: "Not certified",
  integrity_failure: "Ledger integrity failure",
  never_reported: "No reports submitted",
};

export function renderBadgePanel(view: PanelView<Badge>, boc: BocDoc | null): string {
  if (view.kind === "loading") {
    return `<section class="badge-panel"><p class="loading">Loading badge...</p></section>`;
  }
  if (view.kind === "error") {
    return (
      `<section class="badge-panel"><div class="error-state" role="alert">` +
      `<p>Could not reach the registry: ${escapeHtml(view.message)}</p>` +
      `<button type="button" data-action="retry-badge">Retry</button>` +
      `</div></section>`
    );
  }
  const badge = view.body;
  const ageDays =
    badge.latest_report_age_seconds === null
      ? null
      : Math.floor(badge.latest_report_age_seconds / 86400);
  const certified =
    badge.boc_valid && boc !== null
      ? `<p class="certification">certified by ${escapeHtml(boc.issuer_id)}</p>`
      : `<p class="certification">no valid certificate on record</p>`;
  return (
    `<section class="badge-panel">` +
    `<div class="badge badge-${escapeAttr(badge.status)}">` +
    `<span class="badge-text">${escapeHtml(BADGE_TEXT[badge.status])}</span>` +
    `</div>` +
    (ageDays === null ? "" : `<p class="badge-age">latest report is ${ageDays} days old</p>`) +
    certified +
    `</section>`
  );
}

/** Oldest first; the history reads top to bottom like a log. */
export function renderAuditHistory(events: AuditEventDoc[]): string {
  if (events.length === 0) {
    return `<section class="audit-history"><h2>Audit history</h2><p>No audit events recorded.</p></section>`;
  }
  const ordered = [...events].sort((a, b) => (a.at < b.at ? -1 : a.at > b.at ? 1 : 0));
  const items = ordered.map(
    (e) =>
      `<li><time>${escapeHtml(e.at)}</time> ` +
      `<span class="finding finding-${escapeAttr(e.finding)}">${escapeHtml(e.finding)}</span> ` +
      `by ${escapeHtml(e.auditor_id)}` +
      (e.note === "" ? "" : `: ${escapeHtml(e.note)}`) +
      `</li>`
  );
  return (
    `<section class="audit-history"><h2>Audit history</h2>` +
    `<ol>${items.join("")}</ol></section>`
  );
}

/** Snapshot provenance. Shows digests and the key fingerprint only; the key
 * itself never reaches the registry, let alone this page. */
export function renderSnapshotPanel(report: AuditReportDoc): string {
  const s = report.snapshot;
  return (
    `<section class="snapshot-panel"><h2>Escrowed snapshot</h2><dl>` +
    `<dt>report timestamp</dt><dd>${escapeHtml(report.timestamp)}</dd>` +
    `<dt>dataset</dt><dd>${escapeHtml(report.dataset_name)}</dd>` +
    `<dt>ciphertext digest</dt><dd class="digest">${escapeHtml(s.ciphertext_digest)}</dd>` +
    `<dt>key fingerprint</dt><dd class="digest">${escapeHtml(s.key_fingerprint)}</dd>` +
    `<dt>cipher</dt><dd>${escapeHtml(s.aead_algorithm)}</dd>` +
    `</dl></section>`
  );
}

/** Drift chart plus a text table of the same numbers.
 *
 * The SVG is decoration; the table is the accessible record, so screen
 * readers and tests read values without parsing coordinates.
 */
export function renderDriftChart(points: DriftPoint[], threshold: number): string {
  const rows = points
    .map(
      (p) =>
        `<tr><td>v${p.report_version}</td><td><time>${escapeHtml(p.timestamp)}</time></td>` +
        `<td class="value">${p.gap === null ? "n/a" : String(p.gap)}</td>` +
        `<td>${p.alert ? `<strong class="drift-alert">drift alert</strong>` : ""}</td></tr>`
    )
    .join("");
  const table =
    `<table class="drift-table"><caption>Largest gap by report (alert over ${String(threshold)})</caption>` +
    `<thead><tr><th>version</th><th>timestamp</th><th>gap</th><th></th></tr></thead>` +
    `<tbody>${rows}</tbody></table>`;
  if (points.length < 2) {
    return (
      `<section class="drift-panel"><h2>Drift</h2>` +
      `<p class="no-prior">no prior report to compare against</p>` +
      (points.length === 1 ? table : "") +
      `</section>`
    );
  }
  const gaps = points.map((p) => p.gap ?? 0);
  const maxGap = Math.max(...gaps, threshold, 1e-9);
  const width = 260;
  const height = 80;
  const step = points.length > 1 ? width / (points.length - 1) : 0;
  const coords = points.map((p, i) => {
    const x = i * step;
    const y = height - ((p.gap ?? 0) / maxGap) * height;
    return { x, y, alert: p.alert };
  });
  const line = coords.map((c) => `${c.x.toFixed(1)},${c.y.toFixed(1)}`).join(" ");
  const markers = coords
    .map(
      (c) =>
        `<circle cx="${c.x.toFixed(1)}" cy="${c.y.toFixed(1)}" r="4" ` +
        `class="${c.alert ? "point alert-marker" : "point"}"></circle>`
    )
    .join("");
  return (
    `<section class="drift-panel"><h2>Drift</h2>` +
    `<svg viewBox="0 -6 ${width} ${height + 12}" role="img" aria-label="gap drift across reports">` +
    `<polyline fill="none" points="${line}"></polyline>${markers}</svg>` +
    table +
    `</section>`
  );
}

export function renderLedgerPanel(view: PanelView<LedgerVerdict>): string {
  if (view.kind === "loading") {
    return `<section class="ledger-panel"><p class="loading">Checking ledger...</p></section>`;
  }
  if (view.kind === "error") {
    return (
      `<section class="ledger-panel"><div class="error-state" role="alert">` +
      `<p>Could not reach the registry: ${escapeHtml(view.message)}</p>` +
      `<button type="button" data-action="retry-ledger">Retry</button>` +
      `</div></section>`
    );
  }
  const v = view.body;
  if (v.ok) {
    return (
      `<section class="ledger-panel"><p class="ledger-ok">` +
      `ledger verified: ${v.length} entries` +
      (v.head_hash === null ? "" : `, head ${escapeHtml(v.head_hash.slice(0, 16))}`) +
      `</p></section>`
    );
  }
  return (
    `<section class="ledger-panel"><p class="ledger-bad" role="alert">` +
    `ledger verification failed` +
    (v.first_bad_index === null ? "" : ` at index ${v.first_bad_index}`) +
    (v.reason === null || v.reason === undefined ? "" : `: ${escapeHtml(v.reason)}`) +
    `</p></section>`
  );
}

export function renderServicePicker(
  services: ServiceSummary[],
  active: string | undefined
): string {
  const options = services
    .map((s) => {
      const selected = s.service_id === active ? " selected" : "";
      const label = s.display_name ?? s.service_id;
      return `<option value="${escapeAttr(s.service_id)}"${selected}>${escapeHtml(label)}</option>`;
    })
    .join("");
  return (
    `<label class="service-picker">Service ` +
    `<select data-action="select-service">${options}</select></label>`
  );
}

export function renderReportHistory(items: ReportSummary[]): string {
  const rows = items
    .map(
      (r) =>
        `<li>v${r.report_version} <time>${escapeHtml(r.timestamp)}</time> ` +
        `<code class="digest">${escapeHtml(r.digest.slice(0, 12))}</code>` +
        (r.audit_flag ? ` <span class="flag">audited</span>` : "") +
        (r.has_boc ? ` <span class="flag">certificate</span>` : "") +
        `</li>`
    )
    .join("");
  return `<section class="report-history"><h2>Reports</h2><ol reversed>${rows}</ol></section>`;
}

/** Shown only when the page holds an auditor token; the public view is
 * strictly read-only. */
export function renderFindingForm(digest: string): string {
  return (
    `<form class="finding-form" data-action="record-finding" data-digest="${escapeAttr(digest)}">` +
    `<h2>Record finding</h2>` +
    `<label>Finding <select name="finding">` +
    `<option value="confirmed">confirmed</option>` +
    `<option value="discrepancy">discrepancy</option>` +
    `<option value="inconclusive">inconclusive</option>` +
    `</select></label>` +
    `<label>Note <input name="note" type="text"></label>` +
    `<button type="submit">Submit finding</button>` +
    `</form>`
  );
}
