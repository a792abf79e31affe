import { ApiError, RegistryClient } from "./api.js";
import type {
  AuditReportDoc,
  Badge,
  DriftPoint,
  Filter,
  LedgerVerdict,
  MetricsResponse,
  ReportSummary,
} from "./types.js";

/** Canonical tag for a filter: sorted name=value pairs.
 *
 * Every metrics fetch is stamped with the tag it was issued for. When the
 * response lands, it is applied only if the tag still matches the active
 * filter; otherwise it is dropped. Responses for the active tag apply in
 * arrival order, so the last one to land wins.
 */
export function filterTag(filter: Filter): string {
  return Object.keys(filter)
    .sort()
    .map((name) => `${name}=${filter[name]}`)
    .join("&");
}

export type MetricsView =
  | { kind: "loading"; filter: Filter }
  | { kind: "ok"; filter: Filter; raw: string; body: MetricsResponse }
  | { kind: "not_computed"; filter: Filter; body: MetricsResponse }
  | { kind: "error"; filter: Filter; message: string };

export type PanelView<T> =
  | { kind: "loading" }
  | { kind: "ok"; body: T; raw: string }
  | { kind: "error"; message: string };

export interface UrlState {
  service?: string;
  criterion?: string;
  filter: Filter;
}

/** Filter state lives in the query string so a view can be shared by URL. */
export function encodeUrlState(state: UrlState): string {
  const params = new URLSearchParams();
  if (state.service !== undefined) {
    params.set("service", state.service);
  }
  if (state.criterion !== undefined) {
    params.set("criterion", state.criterion);
  }
  for (const name of Object.keys(state.filter).sort()) {
    params.set(`attr.${name}`, state.filter[name]!);
  }
  return params.toString();
}

export function decodeUrlState(query: string): UrlState {
  const params = new URLSearchParams(query);
  const state: UrlState = { filter: {} };
  for (const [key, value] of params) {
    if (key === "service") {
      state.service = value;
    } else if (key === "criterion") {
      state.criterion = value;
    } else if (key.startsWith("attr.") && key.length > 5) {
      state.filter[key.slice(5)] = value;
    }
  }
  return state;
}

/** Gap history with an alert wherever the jump exceeds the threshold.
 *
 * Mirrors the server's drift rule: strictly greater than, absolute delta,
 * no alert on the first point or across missing values.
 */
export function driftSeries(
  history: { timestamp: string; report_version: number; digest: string; gap: number | null }[],
  threshold: number
): DriftPoint[] {
  const points: DriftPoint[] = [];
  let previous: number | null = null;
  for (const entry of history) {
    let alert = false;
    if (entry.gap !== null && previous !== null) {
      alert = Math.abs(entry.gap - previous) > threshold;
    }
    points.push({ ...entry, alert });
    if (entry.gap !== null) {
      previous = entry.gap;
    }
  }
  return points;
}

type Listener = () => void;

export class DashboardState {
  private activeFilter: Filter = {};
  private activeService: string | undefined;
  private activeCriterion: string | undefined;

  metrics: MetricsView = { kind: "loading", filter: {} };
  badge: PanelView<Badge> = { kind: "loading" };
  latestReport: PanelView<AuditReportDoc> = { kind: "loading" };
  reportHistory: PanelView<{ items: ReportSummary[] }> = { kind: "loading" };
  ledger: PanelView<LedgerVerdict> = { kind: "loading" };

  private listeners: Listener[] = [];

  constructor(private readonly client: RegistryClient) {}

  get filter(): Filter {
    return { ...this.activeFilter };
  }

  get service(): string | undefined {
    return this.activeService;
  }

  get criterion(): string | undefined {
    return this.activeCriterion;
  }

  get urlState(): UrlState {
    const state: UrlState = { filter: { ...this.activeFilter } };
    if (this.activeService !== undefined) {
      state.service = this.activeService;
    }
    if (this.activeCriterion !== undefined) {
      state.criterion = this.activeCriterion;
    }
    return state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener();
    }
  }

  async selectService(serviceId: string): Promise<void> {
    this.activeService = serviceId;
    this.activeFilter = {};
    await Promise.all([
      this.refreshMetrics(),
      this.refreshBadge(),
      this.refreshReports(),
      this.refreshLedger(),
    ]);
  }

  applyUrlState(state: UrlState): Promise<void> {
    this.activeService = state.service;
    this.activeCriterion = state.criterion;
    this.activeFilter = { ...state.filter };
    if (this.activeService === undefined) {
      return Promise.resolve();
    }
    return Promise.all([
      this.refreshMetrics(),
      this.refreshBadge(),
      this.refreshReports(),
      this.refreshLedger(),
    ]).then(() => undefined);
  }

  applyFilter(name: string, value: string): Promise<void> {
    this.activeFilter = { ...this.activeFilter, [name]: value };
    return this.refreshMetrics();
  }

  removeFilter(name: string): Promise<void> {
    const next = { ...this.activeFilter };
    delete next[name];
    this.activeFilter = next;
    return this.refreshMetrics();
  }

  clearFilters(): Promise<void> {
    this.activeFilter = {};
    return this.refreshMetrics();
  }

  selectCriterion(criterion: string | undefined): Promise<void> {
    this.activeCriterion = criterion;
    return this.refreshMetrics();
  }

  async refreshMetrics(): Promise<void> {
    if (this.activeService === undefined) {
      return;
    }
    const issuedFor = { ...this.activeFilter };
    const tag = filterTag(issuedFor);
    const service = this.activeService;
    const criterion = this.activeCriterion;
    this.metrics = { kind: "loading", filter: issuedFor };
    this.notify();
    let view: MetricsView;
    try {
      const result = await this.client.getMetrics(service, issuedFor, criterion);
      view =
        result.body.status === "not_computed"
          ? { kind: "not_computed", filter: issuedFor, body: result.body }
          : { kind: "ok", filter: issuedFor, raw: result.raw, body: result.body };
    } catch (err) {
      view = {
        kind: "error",
        filter: issuedFor,
        message: err instanceof ApiError ? err.detail : String(err),
      };
    }
    // Stale suppression: the filter moved on while this request was in
    // flight, so the response must not reach the screen.
    if (filterTag(this.activeFilter) !== tag || this.activeService !== service) {
      return;
    }
    this.metrics = view;
    this.notify();
  }

  async refreshBadge(): Promise<void> {
    if (this.activeService === undefined) {
      return;
    }
    const service = this.activeService;
    this.badge = { kind: "loading" };
    this.notify();
    try {
      const result = await this.client.getBadge(service);
      if (this.activeService !== service) {
        return;
      }
      this.badge = { kind: "ok", body: result.body, raw: result.raw };
    } catch (err) {
      if (this.activeService !== service) {
        return;
      }
      this.badge = {
        kind: "error",
        message: err instanceof ApiError ? err.detail : String(err),
      };
    }
    this.notify();
  }

  async refreshReports(): Promise<void> {
    if (this.activeService === undefined) {
      return;
    }
    const service = this.activeService;
    this.reportHistory = { kind: "loading" };
    this.latestReport = { kind: "loading" };
    this.notify();
    try {
      const page = await this.client.listReports(service, undefined, 50);
      if (this.activeService !== service) {
        return;
      }
      this.reportHistory = {
        kind: "ok",
        body: { items: page.body.items },
        raw: page.raw,
      };
      const newest = page.body.items[0];
      if (newest === undefined) {
        this.latestReport = { kind: "error", message: "no reports submitted" };
      } else {
        const report = await this.client.getReport(newest.digest);
        if (this.activeService !== service) {
          return;
        }
        this.latestReport = { kind: "ok", body: report.body, raw: report.raw };
      }
    } catch (err) {
      if (this.activeService !== service) {
        return;
      }
      const message = err instanceof ApiError ? err.detail : String(err);
      this.reportHistory = { kind: "error", message };
      this.latestReport = { kind: "error", message };
    }
    this.notify();
  }

  async refreshLedger(): Promise<void> {
    this.ledger = { kind: "loading" };
    this.notify();
    try {
      const result = await this.client.verifyLedger();
      this.ledger = { kind: "ok", body: result.body, raw: result.raw };
    } catch (err) {
      this.ledger = {
        kind: "error",
        message: err instanceof ApiError ? err.detail : String(err),
      };
    }
    this.notify();
  }
}
