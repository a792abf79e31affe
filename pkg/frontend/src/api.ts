import type {
  AuditReportDoc,
  Badge,
  Filter,
  LedgerVerdict,
  MetricsResponse,
  ReportPage,
  ServiceSummary,
} from "./types.js";

/** Structural subset of fetch so tests can inject a double. */
export interface FetchLike {
  (url: string, init?: FetchInit): Promise<ResponseLike>;
}

export interface FetchInit {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}

export interface ResponseLike {
  ok: boolean;
  status: number;
  text(): Promise<string>;
}

/** Parsed body plus the raw bytes it was parsed from.
 *
 * Metric values are displayed straight from `raw` (see rawjson.ts), so the
 * two must always travel together.
 */
export interface ApiResult<T> {
  status: number;
  raw: string;
  body: T;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string
  ) {
    super(`registry returned ${status}: ${detail}`);
  }
}

export interface ClientOptions {
  baseUrl: string;
  fetch: FetchLike;
  /** Enables the record-finding form; never sent on read-only requests. */
  auditorToken?: string;
}

export class RegistryClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private readonly auditorToken: string | undefined;

  constructor(options: ClientOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.fetchImpl = options.fetch;
    this.auditorToken = options.auditorToken;
  }

  get canRecordFindings(): boolean {
    return this.auditorToken !== undefined;
  }

  listServices(): Promise<ApiResult<{ services: ServiceSummary[] }>> {
    return this.get("/v1/services");
  }

  getService(serviceId: string): Promise<ApiResult<ServiceSummary>> {
    return this.get(`/v1/services/${encodeURIComponent(serviceId)}`);
  }

  getBadge(serviceId: string): Promise<ApiResult<Badge>> {
    return this.get(`/v1/services/${encodeURIComponent(serviceId)}/badge`);
  }

  getMetrics(
    serviceId: string,
    filter: Filter,
    criterion?: string
  ): Promise<ApiResult<MetricsResponse>> {
    const params = new URLSearchParams();
    if (criterion !== undefined) {
      params.set("criterion", criterion);
    }
    for (const name of Object.keys(filter).sort()) {
      params.set(`attr.${name}`, filter[name]!);
    }
    const query = params.toString();
    const path = `/v1/services/${encodeURIComponent(serviceId)}/metrics`;
    return this.get(query === "" ? path : `${path}?${query}`);
  }

  listReports(
    serviceId: string,
    cursor?: string,
    limit = 20
  ): Promise<ApiResult<ReportPage>> {
    const params = new URLSearchParams({ limit: String(limit) });
    if (cursor !== undefined) {
      params.set("cursor", cursor);
    }
    return this.get(
      `/v1/services/${encodeURIComponent(serviceId)}/reports?${params.toString()}`
    );
  }

  getReport(digest: string): Promise<ApiResult<AuditReportDoc>> {
    return this.get(`/v1/reports/${encodeURIComponent(digest)}`);
  }

  verifyLedger(): Promise<ApiResult<LedgerVerdict>> {
    return this.get("/v1/ledger/verify");
  }

  async recordFinding(
    digest: string,
    finding: string,
    note: string
  ): Promise<ApiResult<unknown>> {
    if (this.auditorToken === undefined) {
      throw new ApiError(401, "recording findings requires an auditor token");
    }
    return this.request(
      `/v1/reports/${encodeURIComponent(digest)}/audits`,
      {
        method: "POST",
        headers: {
          "content-type": "application/json",
          authorization: `Bearer ${this.auditorToken}`,
        },
        body: JSON.stringify({ finding, note }),
      }
    );
  }

  private get<T>(path: string): Promise<ApiResult<T>> {
    return this.request<T>(path, {});
  }

  private async request<T>(path: string, init: FetchInit): Promise<ApiResult<T>> {
    let response: ResponseLike;
    try {
      response = await this.fetchImpl(this.baseUrl + path, init);
    } catch (err) {
      throw new ApiError(0, err instanceof Error ? err.message : String(err));
    }
    const raw = await response.text();
    if (!response.ok) {
      let detail = raw;
      try {
        const parsed = JSON.parse(raw) as { detail?: string };
        if (typeof parsed.detail === "string") {
          detail = parsed.detail;
        }
      } catch {
        // non-JSON error body, keep the raw text
      }
      throw new ApiError(response.status, detail);
    }
    return { status: response.status, raw, body: JSON.parse(raw) as T };
  }
}
