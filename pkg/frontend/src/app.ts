/** Browser entry point. Everything testable lives in the other modules;
 * this file owns the document, the URL bar, and event wiring.
 */

import { RegistryClient } from "./api.js";
import { DashboardState, decodeUrlState, driftSeries, encodeUrlState, filterTag } from "./state.js";
import {
  renderAuditHistory,
  renderBadgePanel,
  renderDriftChart,
  renderFilterRail,
  renderFindingForm,
  renderLedgerPanel,
  renderMetricsPanel,
  renderReportHistory,
  renderServicePicker,
  renderSnapshotPanel,
} from "./render.js";
import type { DriftPoint, ServiceSummary } from "./types.js";

// Alert when the largest gap moves by more than this between reports.
const DRIFT_THRESHOLD = 0.1;
// Reports fetched for the drift chart; history beyond this stays listed only.
const DRIFT_WINDOW = 12;

function largestGap(results: { gap?: number | null }[]): number | null {
  let largest: number | null = null;
  for (const item of results) {
    if (typeof item.gap === "number") {
      const magnitude = Math.abs(item.gap);
      if (largest === null || magnitude > largest) {
        largest = magnitude;
      }
    }
  }
  return largest;
}

class App {
  private readonly client: RegistryClient;
  private readonly state: DashboardState;
  private services: ServiceSummary[] = [];
  private drift: DriftPoint[] = [];
  private auditor: boolean;

  constructor(private readonly root: HTMLElement, auditorToken: string | undefined) {
    this.client = new RegistryClient({
      baseUrl: window.location.origin,
      fetch: (url, init) => window.fetch(url, init),
      auditorToken,
    });
    this.auditor = auditorToken !== undefined;
    this.state = new DashboardState(this.client);
    this.state.subscribe(() => this.render());
  }

  async boot(): Promise<void> {
    this.root.addEventListener("click", (event) => this.onClick(event));
    this.root.addEventListener("submit", (event) => this.onSubmit(event));
    this.root.addEventListener("change", (event) => this.onChange(event));
    try {
      const listing = await this.client.listServices();
      this.services = listing.body.services;
    } catch {
      this.services = [];
    }
    const fromUrl = decodeUrlState(window.location.search);
    if (fromUrl.service === undefined && this.services.length > 0) {
      fromUrl.service = this.services[0]!.service_id;
    }
    await this.state.applyUrlState(fromUrl);
    await this.loadDrift();
    this.render();
  }

  private async loadDrift(): Promise<void> {
    this.drift = [];
    const history = this.state.reportHistory;
    if (history.kind !== "ok") {
      return;
    }
    // Oldest first so the chart reads left to right.
    const window_ = [...history.body.items].slice(0, DRIFT_WINDOW).reverse();
    const points: DriftPoint[] = [];
    for (const summary of window_) {
      let gap: number | null = null;
      try {
        const report = await this.client.getReport(summary.digest);
        const whole = report.body.fairness_report.slices.find(
          (s) => Object.keys(s.filter).length === 0
        );
        gap = largestGap(whole?.results ?? report.body.fairness_report.results);
      } catch {
        gap = null;
      }
      points.push({
        timestamp: summary.timestamp,
        report_version: summary.report_version,
        digest: summary.digest,
        gap,
        alert: false,
      });
    }
    this.drift = driftSeries(points, DRIFT_THRESHOLD);
  }

  private syncUrl(): void {
    const query = encodeUrlState(this.state.urlState);
    const url = query === "" ? window.location.pathname : `?${query}`;
    window.history.replaceState(null, "", url);
  }

  private knownAttributes(): string[] {
    const latest = this.state.latestReport;
    if (latest.kind !== "ok") {
      return [];
    }
    const names = new Set<string>();
    for (const slice of latest.body.fairness_report.slices) {
      for (const name of Object.keys(slice.filter)) {
        names.add(name);
      }
    }
    return [...names].sort();
  }

  render(): void {
    this.syncUrl();
    const latest = this.state.latestReport;
    const boc = latest.kind === "ok" ? latest.body.boc : null;
    const right = [
      renderBadgePanel(this.state.badge, boc),
      latest.kind === "ok" ? renderAuditHistory(latest.body.audit_history) : "",
      latest.kind === "ok" ? renderSnapshotPanel(latest.body) : "",
      renderDriftChart(this.drift, DRIFT_THRESHOLD),
      this.state.reportHistory.kind === "ok"
        ? renderReportHistory(this.state.reportHistory.body.items)
        : "",
      this.auditor && latest.kind === "ok" && this.state.badge.kind === "ok"
        ? renderFindingForm(this.state.badge.body.latest_report_digest ?? "")
        : "",
    ].join("");
    this.root.innerHTML =
      `<header class="top-bar">` +
      renderServicePicker(this.services, this.state.service) +
      renderLedgerPanel(this.state.ledger) +
      `</header>` +
      `<div class="layout">` +
      `<aside class="rail-left">${renderFilterRail(this.state.filter, this.knownAttributes())}</aside>` +
      `<main class="center">${renderMetricsPanel(this.state.metrics)}</main>` +
      `<aside class="rail-right">${right}</aside>` +
      `</div>`;
  }

  private onClick(event: Event): void {
    const target = (event.target as HTMLElement).closest("[data-action]");
    if (!(target instanceof HTMLElement)) {
      return;
    }
    const action = target.dataset["action"];
    if (action === "remove-filter" && target.dataset["name"] !== undefined) {
      void this.state.removeFilter(target.dataset["name"]);
    } else if (action === "clear-filters") {
      void this.state.clearFilters();
    } else if (action === "use-slice") {
      const tag = target.dataset["slice"] ?? "";
      void this.applySliceTag(tag);
    } else if (action === "use-criterion") {
      void this.state.selectCriterion(target.dataset["criterion"]);
    } else if (action === "retry-metrics") {
      void this.state.refreshMetrics();
    } else if (action === "retry-badge") {
      void this.state.refreshBadge();
    } else if (action === "retry-ledger") {
      void this.state.refreshLedger();
    }
  }

  private async applySliceTag(tag: string): Promise<void> {
    await this.state.clearFilters();
    for (const clause of tag.split("&")) {
      if (clause === "") {
        continue;
      }
      const eq = clause.indexOf("=");
      await this.state.applyFilter(clause.slice(0, eq), clause.slice(eq + 1));
    }
  }

  private onSubmit(event: Event): void {
    const form = event.target;
    if (!(form instanceof HTMLFormElement)) {
      return;
    }
    event.preventDefault();
    const action = form.dataset["action"];
    const data = new FormData(form);
    if (action === "add-filter") {
      const name = String(data.get("attribute") ?? "");
      const value = String(data.get("value") ?? "");
      if (name !== "" && value !== "") {
        void this.state.applyFilter(name, value);
      }
    } else if (action === "record-finding") {
      const digest = form.dataset["digest"] ?? "";
      const finding = String(data.get("finding") ?? "");
      const note = String(data.get("note") ?? "");
      void this.client
        .recordFinding(digest, finding, note)
        .then(() => this.state.refreshReports())
        .then(() => this.state.refreshBadge());
    }
  }

  private onChange(event: Event): void {
    const target = event.target;
    if (
      target instanceof HTMLSelectElement &&
      target.dataset["action"] === "select-service"
    ) {
      void this.state.selectService(target.value).then(() => this.loadDrift());
    }
  }
}

export function start(): void {
  const root = document.getElementById("app");
  if (root === null) {
    throw new Error("missing #app element");
  }
  const params = new URLSearchParams(window.location.search);
  // The token never persists; pasting it into the URL is an explicit,
  // per-session choice by the auditor.
  const token = params.get("auditor_token") ?? undefined;
  const app = new App(root, token);
  void app.boot();
}

if (typeof document !== "undefined" && document.getElementById("app") !== null) {
  start();
}

// Re-exported so the compiled bundle exposes the testable surface too.
export { filterTag };
