import pytest

from fairlens import (
    EngineConfig,
    canonical_digest,
    compute_report,
    encrypt_snapshot,
    issue_boc,
)
from fairlens.audit import (
    CANONICAL_DISCLAIMER,
    AuditEvent,
    AuditReport,
    build_audit_report,
    record_audit,
    with_boc,
)
from fairlens.crypto import generate_signing_key
from fairlens.errors import BindingError, ValidationError
from fairlens.ledger import Ledger

from conftest import make_dataset

T = "2026-01-01T00:00:00Z"
KEY = bytes(range(32))


def fresh_report() -> AuditReport:
    ds = make_dataset(
        [(1, 1, "M"), (1, 0, "M"), (0, 1, "M"), (0, 0, "M"), (1, 1, "F"), (0, 0, "F")],
        protected=("sex",),
    )
    fairness = compute_report(
        ds, ["demographic_parity"], config=EngineConfig(min_support=1, slice_depth=1), timestamp=T
    )
    _, info = encrypt_snapshot(b"raw data", KEY, seed=5)
    return build_audit_report(
        service_id="svc",
        vendor_id="acme",
        report_version=1,
        dataset_name="d",
        dataset_digest=canonical_digest({"file": "d.csv"}),
        snapshot=info,
        fairness_report=fairness,
        timestamp=T,
    )


def event_for(report: AuditReport, finding="confirmed", at="2026-02-01T00:00:00Z") -> AuditEvent:
    return AuditEvent(
        auditor_id="aud-1",
        at=at,
        finding=finding,
        note="checked",
        probed_report_digest=report.digest(),
    )


def test_disclaimer_is_mandatory_and_exact():
    report = fresh_report()
    assert report.disclaimer == "Fairness metrics are relative; no AI is completely unbiased."
    assert report.disclaimer == CANONICAL_DISCLAIMER
    import dataclasses

    with pytest.raises(ValidationError):
        dataclasses.replace(report, disclaimer=report.disclaimer.rstrip("."))
    with pytest.raises(ValidationError):
        dataclasses.replace(report, disclaimer=report.disclaimer.upper())


def test_digest_excludes_mutable_audit_state():
    report = fresh_report()
    digest = report.digest()
    audited = record_audit(report, event_for(report))
    assert audited.audit_flag is True
    assert len(audited.audit_history) == 1
    assert audited.digest() == digest
    sk = generate_signing_key()
    certified = with_boc(report, issue_boc(digest, "board", sk))
    assert certified.digest() == digest
    # The full document does change; only the content address is stable.
    assert certified.to_doc() != report.to_doc()


def test_flag_and_history_must_agree():
    report = fresh_report()
    import dataclasses

    with pytest.raises(ValidationError):
        dataclasses.replace(report, audit_flag=True)  # flag without history
    event = event_for(report)
    with pytest.raises(ValidationError):
        dataclasses.replace(report, audit_history=(event,))  # history without flag


def test_record_audit_requires_matching_digest():
    report = fresh_report()
    wrong = AuditEvent(
        auditor_id="aud-1",
        at="2026-02-01T00:00:00Z",
        finding="confirmed",
        note="n",
        probed_report_digest=canonical_digest({"not": "this report"}),
    )
    with pytest.raises(BindingError):
        record_audit(report, wrong)


def test_record_audit_appends_to_ledger(tmp_path):
    report = fresh_report()
    ledger = Ledger(tmp_path / "l.ndjson")
    event = event_for(report)
    record_audit(report, event, ledger=ledger)
    assert len(ledger) == 1
    assert ledger.head().payload_digest == canonical_digest(event.to_doc())
    assert ledger.head().timestamp == event.at


def test_audit_history_accumulates_in_order():
    report = fresh_report()
    first = record_audit(report, event_for(report, "discrepancy", "2026-02-01T00:00:00Z"))
    second = record_audit(first, event_for(report, "confirmed", "2026-03-01T00:00:00Z"))
    findings = [e.finding for e in second.audit_history]
    assert findings == ["discrepancy", "confirmed"]
    assert second.digest() == report.digest()


def test_event_validation():
    report = fresh_report()
    with pytest.raises(ValidationError):
        event_for(report, finding="looks_fine")
    with pytest.raises(ValidationError):
        AuditEvent(
            auditor_id="",
            at=T,
            finding="confirmed",
            note="n",
            probed_report_digest=report.digest(),
        )


def test_with_boc_requires_binding():
    report = fresh_report()
    sk = generate_signing_key()
    foreign = issue_boc(canonical_digest({"other": 1}), "board", sk)
    with pytest.raises(BindingError):
        with_boc(report, foreign)


def test_report_doc_round_trip():
    report = fresh_report()
    audited = record_audit(report, event_for(report))
    sk = generate_signing_key()
    full = with_boc(audited, issue_boc(report.digest(), "board", sk))
    again = AuditReport.from_doc(full.to_doc())
    assert again == full
    assert again.digest() == report.digest()


def test_report_version_validation():
    report = fresh_report()
    import dataclasses

    with pytest.raises(ValidationError):
        dataclasses.replace(report, report_version=0)
