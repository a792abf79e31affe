/** Shapes of the registry API documents the dashboard consumes. */

export type Filter = Record<string, string>;

export interface ServiceSummary {
  service_id: string;
  vendor_id: string;
  display_name: string | null;
  audit_frequency_days: number;
  created_at: string;
  report_count: number;
}

export interface MetricItem {
  criterion: string;
  attribute: string | null;
  status: string;
  group_values?: Record<string, number | null>;
  gap?: number | null;
  ratio?: number | null;
  details?: Record<string, unknown>;
  undefined_groups?: [string, string][];
  board_approved?: boolean;
  custom?: boolean;
  reason?: string;
  [key: string]: unknown;
}

export interface MetricsResponse {
  service_id: string;
  report_digest: string;
  criterion: string | null;
  filter: Filter;
  status: "ok" | "not_computed";
  user_count?: number;
  results?: MetricItem[];
  reason?: string;
  available_slices?: Filter[];
  available_criteria?: string[];
}

export interface Badge {
  service_id: string;
  status:
    | "compliant"
    | "stale"
    | "audit_discrepancy"
    | "not_certified"
    | "integrity_failure"
    | "never_reported";
  latest_report_digest: string | null;
  latest_report_age_seconds: number | null;
  audit_frequency_days: number;
  boc_valid: boolean;
  chain_ok: boolean;
}

export interface AuditEventDoc {
  auditor_id: string;
  at: string;
  finding: string;
  note: string;
  probed_report_digest: string;
}

export interface BocDoc {
  issuer_id: string;
  report_digest: string;
  issued_at: string;
  algorithm: string;
  signature: string;
  signer_public_key_id: string;
}

export interface SnapshotDoc {
  aead_algorithm: string;
  ciphertext_digest: string;
  key_fingerprint: string;
  nonce: string;
  plaintext_length: number;
}

export interface AuditReportDoc {
  schema: string;
  service_id: string;
  vendor_id: string;
  report_version: number;
  dataset_name: string;
  dataset_digest: string;
  timestamp: string;
  disclaimer: string;
  snapshot: SnapshotDoc;
  fairness_report: {
    record_count: number;
    created_at: string;
    results: MetricItem[];
    slices: { filter: Filter; user_count: number; results: MetricItem[] }[];
    [key: string]: unknown;
  };
  audit_flag: boolean;
  audit_history: AuditEventDoc[];
  boc: BocDoc | null;
}

export interface ReportSummary {
  digest: string;
  service_id: string;
  report_version: number;
  timestamp: string;
  dataset_name: string;
  audit_flag: boolean;
  has_boc: boolean;
  ledger_index: number;
}

export interface ReportPage {
  items: ReportSummary[];
  next_cursor: string | null;
}

export interface LedgerVerdict {
  ok: boolean;
  length: number;
  head_hash: string | null;
  first_bad_index: number | null;
  reason: string | null;
}

/** One point on the drift chart. */
export interface DriftPoint {
  timestamp: string;
  report_version: number;
  digest: string;
  gap: number | null;
  alert: boolean;
}
