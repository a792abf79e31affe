"""Publishable audit reports: the self-reported artifact vendors submit.

An audit report wraps one fairness report with service identity, the
encrypted-snapshot reference, the mandatory disclaimer, and the audit trail.
Its content digest covers everything except ``audit_flag``, ``audit_history``
and ``boc``: those three change after publication (auditors append findings,
issuers attach certificates), while the digest must keep addressing the same
published content. A certificate signs the digest, so including the
certificate in the digested bytes would be circular anyway.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Mapping

from .canonical import canonical_digest, require_hex_digest
from .crypto import BOC, EncryptedSnapshotInfo
from .errors import BindingError, ValidationError
from .report import FairnessReport
from .timestamps import now_utc, parse_rfc3339

if TYPE_CHECKING:
    from .ledger import Ledger

CANONICAL_DISCLAIMER = "Fairness metrics are relative; no AI is completely unbiased."
AUDIT_REPORT_SCHEMA = "audit-report/1"
AUDIT_EVENT_SCHEMA = "audit-event/1"
FINDINGS = ("confirmed", "discrepancy", "inconclusive")

__all__ = [
    "AUDIT_EVENT_SCHEMA",
    "AUDIT_REPORT_SCHEMA",
    "AuditEvent",
    "AuditReport",
    "CANONICAL_DISCLAIMER",
    "FINDINGS",
    "build_audit_report",
    "record_audit",
    "with_boc",
]


@dataclass(frozen=True)
class AuditEvent:
    """One probe by one auditor against one published report."""

    auditor_id: str
    at: str
    finding: str
    note: str
    probed_report_digest: str

    def __post_init__(self) -> None:
        if not self.auditor_id:
            raise ValidationError("auditor_id must be non-empty")
        parse_rfc3339(self.at)
        if self.finding not in FINDINGS:
            raise ValidationError(f"finding must be one of {list(FINDINGS)}, got {self.finding!r}")
        require_hex_digest(self.probed_report_digest, "probed_report_digest")

    def to_doc(self) -> dict:
        return {
            "schema": AUDIT_EVENT_SCHEMA,
            "auditor_id": self.auditor_id,
            "at": self.at,
            "finding": self.finding,
            "note": self.note,
            "probed_report_digest": self.probed_report_digest,
        }

    @classmethod
    def from_doc(cls, doc: Mapping) -> "AuditEvent":
        try:
            return cls(
                auditor_id=doc["auditor_id"],
                at=doc["at"],
                finding=doc["finding"],
                note=doc["note"],
                probed_report_digest=doc["probed_report_digest"],
            )
        except KeyError as exc:
            raise ValidationError(f"audit event missing field {exc.args[0]!r}") from None


@dataclass(frozen=True)
class AuditReport:
    service_id: str
    vendor_id: str
    report_version: int
    timestamp: str
    dataset_name: str
    dataset_digest: str
    snapshot: EncryptedSnapshotInfo
    fairness_report: FairnessReport
    disclaimer: str = CANONICAL_DISCLAIMER
    audit_flag: bool = False
    audit_history: tuple[AuditEvent, ...] = ()
    boc: BOC | None = None

    def __post_init__(self) -> None:
        if not self.service_id or not self.vendor_id:
            raise ValidationError("service_id and vendor_id must be non-empty")
        if self.report_version < 1:
            raise ValidationError(f"report_version must be >= 1, got {self.report_version}")
        parse_rfc3339(self.timestamp)
        require_hex_digest(self.dataset_digest, "dataset_digest")
        if self.disclaimer != CANONICAL_DISCLAIMER:
            raise ValidationError(
                "disclaimer must equal the canonical disclaimer exactly: "
                f"{CANONICAL_DISCLAIMER!r}"
            )
        if self.audit_flag and not self.audit_history:
            raise ValidationError("audit_flag set without any audit events")
        if self.audit_history and not self.audit_flag:
            raise ValidationError("audit events present but audit_flag unset")

    def content_doc(self) -> dict:
        """The digested fields: everything fixed at publication time."""
        return {
            "schema": AUDIT_REPORT_SCHEMA,
            "service_id": self.service_id,
            "vendor_id": self.vendor_id,
            "report_version": self.report_version,
            "timestamp": self.timestamp,
            "dataset_name": self.dataset_name,
            "dataset_digest": self.dataset_digest,
            "snapshot": self.snapshot.to_doc(),
            "fairness_report": self.fairness_report.to_doc(),
            "disclaimer": self.disclaimer,
        }

    def digest(self) -> str:
        return canonical_digest(self.content_doc())

    def to_doc(self) -> dict:
        doc = self.content_doc()
        doc["audit_flag"] = self.audit_flag
        doc["audit_history"] = [e.to_doc() for e in self.audit_history]
        doc["boc"] = self.boc.to_doc() if self.boc is not None else None
        return doc

    @classmethod
    def from_doc(cls, doc: Mapping) -> "AuditReport":
        if not isinstance(doc, Mapping):
            raise ValidationError("audit report document must be an object")
        if doc.get("schema") != AUDIT_REPORT_SCHEMA:
            raise ValidationError(
                f"unsupported report schema {doc.get('schema')!r}, expected {AUDIT_REPORT_SCHEMA!r}"
            )
        try:
            boc_doc = doc.get("boc")
            return cls(
                service_id=doc["service_id"],
                vendor_id=doc["vendor_id"],
                report_version=doc["report_version"],
                timestamp=doc["timestamp"],
                dataset_name=doc["dataset_name"],
                dataset_digest=doc["dataset_digest"],
                snapshot=EncryptedSnapshotInfo.from_doc(doc["snapshot"]),
                fairness_report=FairnessReport.from_doc(doc["fairness_report"]),
                disclaimer=doc["disclaimer"],
                audit_flag=bool(doc.get("audit_flag", False)),
                audit_history=tuple(
                    AuditEvent.from_doc(e) for e in doc.get("audit_history", ())
                ),
                boc=BOC.from_doc(boc_doc) if boc_doc is not None else None,
            )
        except KeyError as exc:
            raise ValidationError(f"audit report missing field {exc.args[0]!r}") from None


def build_audit_report(
    service_id: str,
    vendor_id: str,
    report_version: int,
    dataset_name: str,
    dataset_digest: str,
    snapshot: EncryptedSnapshotInfo,
    fairness_report: FairnessReport,
    *,
    timestamp: str | None = None,
) -> AuditReport:
    return AuditReport(
        service_id=service_id,
        vendor_id=vendor_id,
        report_version=report_version,
        timestamp=timestamp if timestamp is not None else now_utc(),
        dataset_name=dataset_name,
        dataset_digest=dataset_digest,
        snapshot=snapshot,
        fairness_report=fairness_report,
    )


def record_audit(
    report: AuditReport,
    event: AuditEvent,
    ledger: "Ledger | None" = None,
) -> AuditReport:
    """Append a probe finding to the report's trail and flag it as audited.

    The event must name this report's content digest; recording it against
    any other digest is refused. When a ledger is given the event document
    itself is chained, making the audit trail tamper-evident alongside the
    reports.
    """
    if event.probed_report_digest != report.digest():
        raise BindingError(
            "audit event targets digest "
            f"{event.probed_report_digest[:12]}..., report digest is {report.digest()[:12]}..."
        )
    updated = replace(
        report,
        audit_flag=True,
        audit_history=report.audit_history + (event,),
    )
    if ledger is not None:
        ledger.append(canonical_digest(event.to_doc()), timestamp=event.at)
    return updated


def with_boc(report: AuditReport, boc: BOC) -> AuditReport:
    """Attach a certificate; it must sign this report's content digest."""
    if boc.report_digest != report.digest():
        raise BindingError(
            f"certificate signs digest {boc.report_digest[:12]}..., "
            f"report digest is {report.digest()[:12]}..."
        )
    return replace(report, boc=boc)
