/** Dashboard acceptance: fixture registry responses drive the full pipeline
 * from fetch through state to rendered markup.
 *
 * Fixtures under tests/fixtures/ are byte captures of a live registry run;
 * the backend suite regenerates them, this suite only reads them.
 */

import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";
import { RegistryClient } from "../src/api.js";
import type { FetchLike, ResponseLike } from "../src/api.js";
import { CANONICAL_DISCLAIMER } from "../src/disclaimer.js";
import { renderMetricsPanel } from "../src/render.js";
import { DashboardState } from "../src/state.js";
import type { AuditReportDoc, MetricsResponse } from "../src/types.js";

function fixture(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

function okResponse(body: string): ResponseLike {
  return { ok: true, status: 200, text: () => Promise.resolve(body) };
}

/** Serves fixtures, except metrics requests, which park until the test
 * releases them. The release order is the whole point: it simulates slow
 * responses arriving after the user has already moved on. */
class DelayedRegistry {
  readonly parked: { url: string; release: (body: string) => void }[] = [];

  readonly fetch: FetchLike = (url: string) => {
    const instant = this.instant(url);
    if (instant !== null) {
      return Promise.resolve(okResponse(instant));
    }
    return new Promise<ResponseLike>((resolve) => {
      this.parked.push({ url, release: (body) => resolve(okResponse(body)) });
    });
  };

  private instant(url: string): string | null {
    if (url.endsWith("/v1/services")) return fixture("services.json");
    if (url.includes("/badge")) return fixture("badge.json");
    if (url.includes("/reports?")) return fixture("reports_list.json");
    if (url.includes("/v1/reports/")) return fixture("report_latest.json");
    if (url.includes("/ledger/verify")) return fixture("ledger_verify.json");
    return null;
  }
}

function makeState(fetchImpl: FetchLike): DashboardState {
  return new DashboardState(
    new RegistryClient({ baseUrl: "http://registry.test", fetch: fetchImpl })
  );
}

/** Fully synchronous registry double for the non-racing cases. */
const instantFetch: FetchLike = (url: string) => {
  if (url.endsWith("metrics")) return Promise.resolve(okResponse(fixture("metrics_all.json")));
  if (url.includes("attr.sex=F") && !url.includes("race"))
    return Promise.resolve(okResponse(fixture("metrics_sexF.json")));
  if (url.includes("metrics?")) return Promise.resolve(okResponse(fixture("metrics_unknown_slice.json")));
  const registry = new DelayedRegistry();
  return registry.fetch(url);
};

describe("dashboard acceptance", () => {
  it("shows user_count equal to the dataset total with no filter applied", async () => {
    const state = makeState(instantFetch);
    await state.applyUrlState({ service: "credit-screening", filter: {} });

    expect(state.metrics.kind).toBe("ok");
    if (state.metrics.kind !== "ok") return;
    const total = (JSON.parse(fixture("report_latest.json")) as AuditReportDoc)
      .fairness_report.record_count;
    expect(state.metrics.body.user_count).toBe(total);
    const html = renderMetricsPanel(state.metrics);
    expect(html).toContain(`user_count: <span class="value">${total}</span>`);
  });

  it("shows the F slice with user_count 40 and values byte-equal to the response", async () => {
    const state = makeState(instantFetch);
    await state.applyUrlState({ service: "credit-screening", filter: { sex: "F" } });

    expect(state.metrics.kind).toBe("ok");
    if (state.metrics.kind !== "ok") return;
    const raw = fixture("metrics_sexF.json");
    expect(state.metrics.raw).toBe(raw);
    expect(state.metrics.body.user_count).toBe(40);

    const html = renderMetricsPanel(state.metrics);
    expect(html).toContain(`user_count: <span class="value">40</span>`);

    // Every numeric literal is lifted from the response bytes. The gap and
    // ratio in this capture are exactly the spans JSON.parse would mangle
    // (0.0 -> "0", 1.0 -> "1"), so a reformatting bug cannot pass.
    const gapLiteral = /"gap":([^,}]+)/.exec(raw)![1]!;
    const ratioLiteral = /"ratio":([^,}]+)/.exec(raw)![1]!;
    expect(gapLiteral).toBe("0.0");
    expect(ratioLiteral).toBe("1.0");
    const parsed = JSON.parse(raw) as MetricsResponse;
    expect(String(parsed.results![0]!.gap)).not.toBe(gapLiteral);
    expect(html).toContain(`<dt>gap</dt><dd class="value">${gapLiteral}</dd>`);
    expect(html).toContain(`<dt>ratio</dt><dd class="value">${ratioLiteral}</dd>`);
    const groupValues = /"group_values":\{([^}]*)\}/.exec(raw)![1]!;
    for (const match of groupValues.matchAll(/"(black|white)":([^,}]+)/g)) {
      expect(html).toContain(`<td class="value">${match[2]}</td>`);
    }
  });

  it("renders the disclaimer byte-equal to the canonical string from the report", async () => {
    const report = JSON.parse(fixture("report_latest.json")) as AuditReportDoc;
    expect(report.disclaimer).toBe(CANONICAL_DISCLAIMER);
    // Against the raw bytes too, in case JSON.parse "fixed" an encoding
    // difference: the fixture must contain the exact escaped form.
    expect(fixture("report_latest.json")).toContain(
      `"disclaimer":${JSON.stringify(CANONICAL_DISCLAIMER)}`
    );

    const state = makeState(instantFetch);
    await state.applyUrlState({ service: "credit-screening", filter: {} });
    expect(state.metrics.kind).toBe("ok");
    const html = renderMetricsPanel(state.metrics);
    expect(html).toContain(`<p class="disclaimer" role="note">${CANONICAL_DISCLAIMER}</p>`);
  });

  it("suppresses responses that arrive after the filter has moved on", async () => {
    const registry = new DelayedRegistry();
    const state = makeState(registry.fetch);

    const boot = state.applyUrlState({ service: "credit-screening", filter: {} });
    const applyM = state.applyFilter("sex", "M");
    const applyF = state.applyFilter("sex", "F");
    expect(registry.parked.map((p) => p.url)).toEqual([
      "http://registry.test/v1/services/credit-screening/metrics",
      "http://registry.test/v1/services/credit-screening/metrics?attr.sex=M",
      "http://registry.test/v1/services/credit-screening/metrics?attr.sex=F",
    ]);

    // The F response lands first and is the active filter: it displays.
    registry.parked[2]!.release(fixture("metrics_sexF.json"));
    await applyF;
    expect(state.metrics.kind).toBe("ok");
    if (state.metrics.kind !== "ok") return;
    expect(state.metrics.body.filter).toEqual({ sex: "F" });
    expect(state.metrics.body.user_count).toBe(40);

    // The M response arrives late, doctored to be loud about it. It was
    // issued for a filter that is no longer active, so it must vanish.
    const stale = fixture("metrics_sexF.json")
      .replace('"sex":"F"', '"sex":"M"')
      .replace('"user_count":40', '"user_count":9999');
    registry.parked[1]!.release(stale);
    await applyM;
    // So must the whole-population response from the initial load.
    registry.parked[0]!.release(fixture("metrics_all.json"));
    await boot;

    expect(state.metrics.kind).toBe("ok");
    if (state.metrics.kind !== "ok") return;
    expect(state.metrics.body.filter).toEqual({ sex: "F" });
    expect(state.metrics.body.user_count).toBe(40);
    expect(state.metrics.raw).toBe(fixture("metrics_sexF.json"));
  });

  it("applies the newest response for the active filter when several race", async () => {
    const registry = new DelayedRegistry();
    const state = makeState(registry.fetch);

    const boot = state.applyUrlState({ service: "credit-screening", filter: { sex: "F" } });
    const refresh = state.refreshMetrics();
    expect(registry.parked).toHaveLength(2);

    // Both were issued for the active filter; arrival order decides.
    const older = fixture("metrics_sexF.json").replace(
      '"user_count":40',
      '"user_count":39'
    );
    registry.parked[0]!.release(older);
    await boot;
    registry.parked[1]!.release(fixture("metrics_sexF.json"));
    await refresh;

    expect(state.metrics.kind).toBe("ok");
    if (state.metrics.kind !== "ok") return;
    expect(state.metrics.body.user_count).toBe(40);
  });
});
