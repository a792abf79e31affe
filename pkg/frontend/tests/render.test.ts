import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { CANONICAL_DISCLAIMER } from "../src/disclaimer.js";
import {
  renderAuditHistory,
  renderBadgePanel,
  renderDriftChart,
  renderFilterRail,
  renderFindingForm,
  renderLedgerPanel,
  renderMetricsPanel,
  renderSnapshotPanel,
} from "../src/render.js";
import { driftSeries } from "../src/state.js";
import type {
  AuditReportDoc,
  Badge,
  LedgerVerdict,
  MetricsResponse,
} from "../src/types.js";

function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

describe("metrics panel", () => {
  it("renders the disclaimer on every view state", () => {
    const raw = fixture("metrics_all.json");
    const views = [
      renderMetricsPanel({ kind: "loading", filter: {} }),
      renderMetricsPanel({ kind: "error", filter: {}, message: "boom" }),
      renderMetricsPanel({
        kind: "not_computed",
        filter: { sex: "X" },
        body: JSON.parse(fixture("metrics_unknown_slice.json")) as MetricsResponse,
      }),
      renderMetricsPanel({
        kind: "ok",
        filter: {},
        raw,
        body: JSON.parse(raw) as MetricsResponse,
      }),
    ];
    for (const html of views) {
      expect(html).toContain(CANONICAL_DISCLAIMER);
    }
  });

  it("shows alternatives instead of zeros for a slice that was not computed", () => {
    const raw = fixture("metrics_unknown_slice.json");
    const html = renderMetricsPanel({
      kind: "not_computed",
      filter: { sex: "F", race: "white", income: "high" },
      body: JSON.parse(raw) as MetricsResponse,
    });
    expect(html).toContain("this slice was not precomputed at report time");
    expect(html).toContain("whole population");
    expect(html).toContain("race=white&amp;sex=F");
    // No fabricated numbers for a slice the report does not contain.
    expect(html).not.toContain("user_count");
  });

  it("shows an explicit error state with a retry control", () => {
    const html = renderMetricsPanel({
      kind: "error",
      filter: {},
      message: "connection refused",
    });
    expect(html).toContain('role="alert"');
    expect(html).toContain("connection refused");
    expect(html).toContain('data-action="retry-metrics"');
  });

  it("escapes attacker-controlled attribute values", () => {
    const body: MetricsResponse = {
      service_id: "svc",
      report_digest: "d",
      criterion: null,
      filter: { "<img>": "<script>x</script>" },
      status: "not_computed",
      reason: "no",
      available_slices: [],
    };
    const html = renderMetricsPanel({
      kind: "not_computed",
      filter: body.filter,
      body,
    });
    expect(html).not.toContain("<script>");
  });
});

describe("badge panel", () => {
  const badge = JSON.parse(fixture("badge.json")) as Badge;
  const report = JSON.parse(fixture("report_latest.json")) as AuditReportDoc;

  it("is color-coded by status and names the certificate issuer", () => {
    const html = renderBadgePanel({ kind: "ok", body: badge, raw: "" }, report.boc);
    expect(html).toContain("badge-compliant");
    expect(html).toContain("Compliant");
    expect(html).toContain(`certified by ${report.boc!.issuer_id}`);
  });

  it("reports the absence of a certificate instead of hiding it", () => {
    const uncertified: Badge = { ...badge, status: "not_certified", boc_valid: false };
    const html = renderBadgePanel({ kind: "ok", body: uncertified, raw: "" }, null);
    expect(html).toContain("badge-not_certified");
    expect(html).toContain("no valid certificate");
    expect(html).not.toContain("certified by");
  });

  it("renders an error state with retry when the API is unreachable", () => {
    const html = renderBadgePanel({ kind: "error", message: "unreachable" }, null);
    expect(html).toContain('role="alert"');
    expect(html).toContain('data-action="retry-badge"');
  });
});

describe("audit history", () => {
  it("lists events oldest first regardless of input order", () => {
    const html = renderAuditHistory([
      {
        auditor_id: "aud-2",
        at: "2026-06-12T00:00:00Z",
        finding: "confirmed",
        note: "second",
        probed_report_digest: "d",
      },
      {
        auditor_id: "aud-1",
        at: "2026-06-10T00:00:00Z",
        finding: "discrepancy",
        note: "first",
        probed_report_digest: "d",
      },
    ]);
    expect(html.indexOf("2026-06-10")).toBeLessThan(html.indexOf("2026-06-12"));
    expect(html).toContain("finding-discrepancy");
    expect(html).toContain("aud-2");
  });

  it("says so when there are no events", () => {
    expect(renderAuditHistory([])).toContain("No audit events recorded");
  });
});

describe("snapshot panel", () => {
  it("shows provenance fields and only the key fingerprint", () => {
    const report = JSON.parse(fixture("report_latest.json")) as AuditReportDoc;
    const html = renderSnapshotPanel(report);
    expect(html).toContain(report.timestamp);
    expect(html).toContain(report.dataset_name);
    expect(html).toContain(report.snapshot.ciphertext_digest);
    expect(html).toContain(report.snapshot.key_fingerprint);
    expect(html).toContain(report.snapshot.aead_algorithm);
  });
});

describe("drift chart", () => {
  it("notes the missing comparison when there is a single report", () => {
    const series = driftSeries(
      [{ timestamp: "2026-01-05T00:00:00Z", report_version: 1, digest: "d", gap: 0.3 }],
      0.1
    );
    const html = renderDriftChart(series, 0.1);
    expect(html).toContain("no prior report");
    expect(html).not.toContain("<svg");
  });

  it("marks the alerting point in both the chart and the table", () => {
    const series = driftSeries(
      [
        { timestamp: "2026-01-05T00:00:00Z", report_version: 1, digest: "a", gap: 0.1 },
        { timestamp: "2026-06-01T00:00:00Z", report_version: 2, digest: "b", gap: 0.25 },
      ],
      0.1
    );
    const html = renderDriftChart(series, 0.1);
    expect(html).toContain("<svg");
    expect((html.match(/alert-marker/g) ?? []).length).toBe(1);
    expect((html.match(/drift alert/g) ?? []).length).toBe(1);
  });
});

describe("ledger panel", () => {
  it("summarizes a verified chain", () => {
    const verdict = JSON.parse(fixture("ledger_verify.json")) as LedgerVerdict;
    const html = renderLedgerPanel({ kind: "ok", body: verdict, raw: "" });
    expect(html).toContain("ledger verified: 3 entries");
  });

  it("points at the first bad entry when verification fails", () => {
    const verdict: LedgerVerdict = {
      ok: false,
      length: 3,
      head_hash: null,
      first_bad_index: 1,
      reason: "hash chain broken",
    };
    const html = renderLedgerPanel({ kind: "ok", body: verdict, raw: "" });
    expect(html).toContain("failed at index 1");
    expect(html).toContain("hash chain broken");
  });
});

describe("filter rail and finding form", () => {
  it("lists active filters with remove controls", () => {
    const html = renderFilterRail({ sex: "F" }, ["race", "sex"]);
    expect(html).toContain("sex = F");
    expect(html).toContain('data-action="remove-filter"');
    expect(html).toContain('data-action="clear-filters"');
  });

  it("offers the three findings an auditor can record", () => {
    const html = renderFindingForm("abc123");
    for (const finding of ["confirmed", "discrepancy", "inconclusive"]) {
      expect(html).toContain(`value="${finding}"`);
    }
    expect(html).toContain('data-digest="abc123"');
  });
});
