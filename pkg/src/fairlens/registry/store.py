"""Registry state: content-addressed report blobs, audit overlays, badges.

Everything on disk is reconstructible text: one blob file per submitted
report (named by its content digest), one small overlay file per report for
the mutable audit trail, one services index, and the hash-chain ledger.
Submissions serialize on a single lock and reach the ledger before any
in-memory index, so a reader never observes a report whose ledger entry is
not yet durable.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, replace
from pathlib import Path

from ..audit import AuditEvent, AuditReport, record_audit
from ..canonical import canonical_bytes, canonical_digest, is_hex_digest
from ..crypto import BOC, load_verify_key, verify_boc
from ..errors import (
    ConflictError,
    NotFoundError,
    ValidationError,
)
from ..ledger import ChainVerification, Ledger, LedgerEntry, verify_chain
from ..rng import generator
from ..timestamps import format_utc, parse_rfc3339
from .config import RegistryConfig, SystemClock

_SLUG = re.compile(r"[A-Za-z0-9._~-]{1,64}")

BADGE_COMPLIANT = "compliant"
BADGE_STALE = "stale"
BADGE_NEVER_REPORTED = "never_reported"
BADGE_AUDIT_DISCREPANCY = "audit_discrepancy"
BADGE_NOT_CERTIFIED = "not_certified"
BADGE_INTEGRITY_FAILURE = "integrity_failure"

__all__ = ["RegistryStore", "SubmissionOutcome"]


@dataclass(frozen=True)
class SubmissionOutcome:
    digest: str
    ledger_index: int
    created: bool


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


class RegistryStore:
    def __init__(self, config: RegistryConfig, clock=None):
        self.config = config
        self.clock = clock if clock is not None else SystemClock()
        self.data_dir = Path(config.data_dir)
        self.blob_dir = self.data_dir / "blobs"
        self.audit_dir = self.data_dir / "audits"
        self.services_path = self.data_dir / "services.json"
        for d in (self.data_dir, self.blob_dir, self.audit_dir):
            d.mkdir(parents=True, exist_ok=True)
        self.ledger = Ledger(self.data_dir / "ledger.ndjson")
        self._lock = threading.Lock()
        self._services: dict[str, dict] = {}
        self._reports: dict[str, AuditReport] = {}
        self._blob_bytes: dict[str, bytes] = {}
        self._by_service: dict[str, list[str]] = {}
        self._ledger_index: dict[str, int] = {}
        self._load()

    # -- persistence ------------------------------------------------------

    def _load(self) -> None:
        if self.services_path.exists():
            doc = json.loads(self.services_path.read_text(encoding="utf-8"))
            self._services = dict(doc.get("services", {}))
        for entry in self.ledger.entries():
            self._ledger_index.setdefault(entry.payload_digest, entry.index)
        for blob in sorted(self.blob_dir.glob("*.json")):
            digest = blob.stem
            if not is_hex_digest(digest):
                continue
            data = blob.read_bytes()
            report = AuditReport.from_doc(json.loads(data))
            if report.digest() != digest:
                raise ConflictError(
                    f"blob {blob.name} does not re-digest to its filename; store corrupted"
                )
            report = self._apply_overlay(report, digest)
            self._blob_bytes[digest] = data
            self._reports[digest] = report
            self._by_service.setdefault(report.service_id, []).append(digest)
        for digests in self._by_service.values():
            digests.sort(key=lambda d: (self._reports[d].timestamp, d))

    def _apply_overlay(self, report: AuditReport, digest: str) -> AuditReport:
        path = self.audit_dir / f"{digest}.json"
        if not path.exists():
            return report
        doc = json.loads(path.read_text(encoding="utf-8"))
        boc_doc = doc.get("boc")
        return replace(
            report,
            audit_flag=doc.get("audit_flag", False),
            audit_history=tuple(AuditEvent.from_doc(e) for e in doc.get("audit_history", ())),
            boc=BOC.from_doc(boc_doc) if boc_doc else None,
        )

    def _save_overlay(self, report: AuditReport, digest: str) -> None:
        doc = {
            "audit_flag": report.audit_flag,
            "audit_history": [e.to_doc() for e in report.audit_history],
            "boc": report.boc.to_doc() if report.boc else None,
        }
        _atomic_write(self.audit_dir / f"{digest}.json", canonical_bytes(doc))

    def _save_services(self) -> None:
        _atomic_write(self.services_path, canonical_bytes({"services": self._services}))

    # -- services ---------------------------------------------------------

    def register_service(
        self,
        service_id: str,
        vendor_id: str,
        display_name: str,
        frequency_days: float | None = None,
    ) -> dict:
        if not _SLUG.fullmatch(service_id or ""):
            raise ValidationError(
                "service_id must be a URL-safe slug (letters, digits, . _ ~ -, max 64)"
            )
        freq = self.config.default_frequency_days if frequency_days is None else frequency_days
        if freq <= 0:
            raise ValidationError(f"audit frequency must be > 0 days, got {freq}")
        with self._lock:
            if service_id in self._services:
                raise ConflictError(f"service {service_id!r} is already registered")
            doc = {
                "service_id": service_id,
                "vendor_id": vendor_id,
                "display_name": display_name,
                "audit_frequency_days": freq,
                "created_at": format_utc(self.clock.now()),
            }
            self._services[service_id] = doc
            self._save_services()
            return dict(doc)

    def get_service(self, service_id: str) -> dict:
        doc = self._services.get(service_id)
        if doc is None:
            raise NotFoundError(f"unknown service {service_id!r}")
        out = dict(doc)
        out["report_count"] = len(self._by_service.get(service_id, ()))
        return out

    def list_services(self) -> list[dict]:
        return [self.get_service(sid) for sid in sorted(self._services)]

    # -- reports ----------------------------------------------------------

    def submit_report(self, report: AuditReport, vendor_id: str) -> SubmissionOutcome:
        """Persist a validated report; identical resubmission is a no-op.

        The submitted document may carry a certificate, never an audit
        trail: findings enter through the audit endpoint only. The ledger
        write happens before the report becomes visible.
        """
        if report.vendor_id != vendor_id:
            raise ValidationError(
                f"token vendor {vendor_id!r} may not submit for vendor {report.vendor_id!r}"
            )
        if report.audit_flag or report.audit_history:
            raise ValidationError("submission must not carry an audit trail")
        if report.service_id not in self._services:
            raise NotFoundError(f"unknown service {report.service_id!r}; register it first")
        if self._services[report.service_id]["vendor_id"] != report.vendor_id:
            raise ValidationError(
                f"service {report.service_id!r} belongs to a different vendor"
            )
        digest = report.digest()
        if report.boc is not None:
            self._require_valid_boc(report.boc, digest)
        data = canonical_bytes(report.content_doc())

        with self._lock:
            existing = self._blob_bytes.get(digest)
            if existing is not None:
                if existing != data:
                    raise ConflictError(
                        f"digest {digest} already names different content; integrity alarm"
                    )
                if report.boc is not None:
                    updated = replace(self._reports[digest], boc=report.boc)
                    self._save_overlay(updated, digest)
                    self._reports[digest] = updated
                return SubmissionOutcome(
                    digest=digest, ledger_index=self._ledger_index[digest], created=False
                )
            entry = self.ledger.append(digest, timestamp=format_utc(self.clock.now()))
            _atomic_write(self.blob_dir / f"{digest}.json", data)
            stored = report
            if stored.boc is not None:
                self._save_overlay(stored, digest)
            self._blob_bytes[digest] = data
            self._reports[digest] = stored
            self._ledger_index[digest] = entry.index
            bucket = self._by_service.setdefault(report.service_id, [])
            bucket.append(digest)
            bucket.sort(key=lambda d: (self._reports[d].timestamp, d))
            return SubmissionOutcome(digest=digest, ledger_index=entry.index, created=True)

    def _require_valid_boc(self, boc: BOC, digest: str) -> None:
        key_hex = self.config.issuer_keys.get(boc.issuer_id)
        if key_hex is None:
            raise ValidationError(f"certificate names unknown issuer {boc.issuer_id!r}")
        if not verify_boc(boc, load_verify_key(key_hex), digest):
            raise ValidationError("certificate does not verify against this report")

    def get_report(self, digest: str) -> AuditReport:
        report = self._reports.get(digest)
        if report is None:
            raise NotFoundError(f"no report with digest {digest}")
        return report

    def report_document_bytes(self, digest: str) -> bytes:
        """Current canonical document: immutable content plus audit overlay."""
        return canonical_bytes(self.get_report(digest).to_doc())

    def list_reports(
        self, service_id: str, cursor: str | None = None, limit: int = 20
    ) -> tuple[list[dict], str | None]:
        if service_id not in self._services:
            raise NotFoundError(f"unknown service {service_id!r}")
        if not 1 <= limit <= 200:
            raise ValidationError("limit must be between 1 and 200")
        digests = list(reversed(self._by_service.get(service_id, [])))
        start = 0
        if cursor is not None:
            ts, _, dg = cursor.partition("~")
            if not dg:
                raise ValidationError("malformed cursor")
            # Resume strictly after the cursor position in (timestamp, digest)
            # descending order; stable as newer reports land in front.
            start = len(
                [d for d in digests if (self._reports[d].timestamp, d) >= (ts, dg)]
            )
        page = digests[start : start + limit]
        items = [self._summary(d) for d in page]
        next_cursor = None
        if start + limit < len(digests) and page:
            last = page[-1]
            next_cursor = f"{self._reports[last].timestamp}~{last}"
        return items, next_cursor

    def _summary(self, digest: str) -> dict:
        r = self._reports[digest]
        return {
            "digest": digest,
            "service_id": r.service_id,
            "report_version": r.report_version,
            "timestamp": r.timestamp,
            "dataset_name": r.dataset_name,
            "audit_flag": r.audit_flag,
            "has_boc": r.boc is not None,
            "ledger_index": self._ledger_index.get(digest),
        }

    def latest_report(self, service_id: str) -> AuditReport | None:
        digests = self._by_service.get(service_id, [])
        return self._reports[digests[-1]] if digests else None

    # -- audits -----------------------------------------------------------

    def record_audit_event(
        self, digest: str, auditor_id: str, finding: str, note: str
    ) -> dict:
        event = AuditEvent(
            auditor_id=auditor_id,
            at=format_utc(self.clock.now()),
            finding=finding,
            note=note,
            probed_report_digest=digest,
        )
        with self._lock:
            report = self.get_report(digest)
            updated = record_audit(report, event, self.ledger)
            self._save_overlay(updated, digest)
            self._reports[digest] = updated
        return self.badge(updated.service_id)

    # -- queries ----------------------------------------------------------

    def query_metrics(
        self, service_id: str, clauses: dict[str, str], criterion: str | None
    ) -> dict:
        if service_id not in self._services:
            raise NotFoundError(f"unknown service {service_id!r}")
        latest = self.latest_report(service_id)
        if latest is None:
            raise NotFoundError(f"service {service_id!r} has no reports")
        digest = self._by_service[service_id][-1]
        fr = latest.fairness_report
        base = {
            "service_id": service_id,
            "report_digest": digest,
            "criterion": criterion,
            "filter": dict(clauses),
        }
        entry = next((s for s in fr.slices if s["filter"] == clauses), None)
        if entry is None:
            return {
                **base,
                "status": "not_computed",
                "reason": "this slice was not precomputed at report time",
                "available_slices": [s["filter"] for s in fr.slices],
            }
        results = entry["results"]
        if criterion is not None:
            known = set(fr.config.get("criteria", ()))
            if criterion not in known:
                return {
                    **base,
                    "status": "not_computed",
                    "reason": "criterion not evaluated in the latest report",
                    "available_criteria": sorted(known),
                }
            results = [r for r in results if r.get("criterion") == criterion]
        return {
            **base,
            "status": "ok",
            "user_count": entry["user_count"],
            "results": results,
        }

    # -- badge ------------------------------------------------------------

    def verify(self) -> ChainVerification:
        return verify_chain(self.ledger)

    def _unresolved_discrepancy(self, service_id: str) -> bool:
        events: list[tuple[str, str, str]] = []
        for digest in self._by_service.get(service_id, ()):
            r = self._reports[digest]
            for e in r.audit_history:
                events.append((e.at, r.timestamp, e.finding))
        discrepancies = [e for e in events if e[2] == "discrepancy"]
        if not discrepancies:
            return False
        last = max(discrepancies)
        # Cleared only by a confirmed finding, made later, on a newer report.
        return not any(
            f == "confirmed" and at > last[0] and rts > last[1]
            for at, rts, f in events
        )

    def badge(self, service_id: str) -> dict:
        service = self.get_service(service_id)
        chain = self.verify()
        latest = self.latest_report(service_id)
        doc = {
            "service_id": service_id,
            "status": BADGE_NEVER_REPORTED,
            "latest_report_digest": None,
            "latest_report_age_seconds": None,
            "audit_frequency_days": service["audit_frequency_days"],
            "boc_valid": False,
            "chain_ok": chain.ok,
        }
        if latest is None:
            if not chain.ok:
                doc["status"] = BADGE_INTEGRITY_FAILURE
            return doc
        digest = self._by_service[service_id][-1]
        age = (self.clock.now() - parse_rfc3339(latest.timestamp)).total_seconds()
        boc_valid = False
        if latest.boc is not None:
            key_hex = self.config.issuer_keys.get(latest.boc.issuer_id)
            if key_hex is not None:
                boc_valid = verify_boc(latest.boc, load_verify_key(key_hex), digest)
        doc.update(
            latest_report_digest=digest,
            latest_report_age_seconds=age,
            boc_valid=boc_valid,
        )
        stale = age > service["audit_frequency_days"] * 86400.0
        if not chain.ok:
            doc["status"] = BADGE_INTEGRITY_FAILURE
        elif self._unresolved_discrepancy(service_id):
            doc["status"] = BADGE_AUDIT_DISCREPANCY
        elif stale:
            doc["status"] = BADGE_STALE
        elif not boc_valid:
            doc["status"] = BADGE_NOT_CERTIFIED
        else:
            doc["status"] = BADGE_COMPLIANT
        return doc

    # -- audit sampling ---------------------------------------------------

    def audit_sample(self, n: int, seed: int) -> dict:
        if n < 1:
            raise ValidationError(f"sample size must be >= 1, got {n}")
        population = sorted(self._services)
        truncated = n > len(population)
        take = min(n, len(population))
        order = generator(seed).permutation(len(population))
        sample = [population[i] for i in order[:take]]
        doc = {"seed": seed, "requested": n, "services": sample}
        if truncated:
            doc["note"] = (
                f"requested {n} services but only {len(population)} are registered; "
                "returning the full population"
            )
        return doc
