"""Regenerate the committed test fixtures.

Everything here is deterministic: fixed seeds, fixed timestamps, derived key
material. Run from the repository root:

    python3 scripts/make_fixtures.py

The produced files are committed; tests compare against them byte-for-byte,
so regeneration should be a no-op unless the engine's output format changed
on purpose.
"""

from __future__ import annotations

import hashlib
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from fairlens import canonical_bytes, canonical_digest, sha256_hex  # noqa: E402
from fairlens.cli import main as cli_main  # noqa: E402
from fairlens.crypto import public_key_id  # noqa: E402
from fairlens.ledger import Ledger  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
FRONTEND_FIXTURES = ROOT / "frontend" / "tests" / "fixtures"

T0 = "2026-01-05T00:00:00Z"
T1 = "2026-06-01T00:00:00Z"

AEAD_KEY = hashlib.sha256(b"fixture aead key, not a secret").digest()
SIGNER_KEY = hashlib.sha256(b"fixture signing key, not a secret").digest()


def write(path: Path, data: bytes | str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode("utf-8")
    path.write_bytes(data)
    print(f"wrote {path.relative_to(ROOT)} ({len(data)} bytes)")


def six_fixture() -> None:
    rows = [
        "record_id,y_true,y_pred,sex",
        "m1,1,1,M",
        "m2,1,0,M",
        "m3,0,1,M",
        "m4,0,0,M",
        "f1,1,1,F",
        "f2,0,0,F",
    ]
    write(FIXTURES / "six.csv", "\n".join(rows) + "\n")
    config = {
        "dataset_name": "six",
        "protected_attributes": ["sex"],
        "criteria": ["demographic_parity"],
        "min_support": 1,
        "slice_depth": 1,
        "seed": 0,
    }
    write(FIXTURES / "six_config.json", json.dumps(config, indent=2) + "\n")


def hundred_fixture() -> None:
    rng = np.random.Generator(np.random.PCG64(42))
    lines = ["record_id,y_true,y_score,sex,race,income"]
    for i in range(100):
        sex = "F" if i < 40 else "M"
        race = "black" if i % 2 else "white"
        base = 0.35 if sex == "F" else 0.55
        score = float(np.clip(base + rng.normal(0, 0.22), 0.0, 1.0))
        y_true = int(rng.random() < 0.25 + 0.5 * score)
        income = round(20000 + 600 * i + float(rng.normal(0, 250)), 2)
        lines.append(f"u{i:03d},{y_true},{score:.4f},{sex},{race},{income}")
    write(FIXTURES / "fixture100.csv", "\n".join(lines) + "\n")
    config = {
        "dataset_name": "credit-screening-eval",
        "protected_attributes": ["sex", "race"],
        "declared_features": ["income"],
        "criteria": [
            "demographic_parity",
            "equalized_opportunity",
            "equalized_odds",
            "unawareness",
        ],
        "threshold": 0.5,
        "min_support": 30,
        "slice_depth": 2,
        "seed": 0,
    }
    write(FIXTURES / "fixture100_config.json", json.dumps(config, indent=2) + "\n")
    config_v2 = dict(config, threshold=0.6)
    write(FIXTURES / "fixture100_config_v2.json", json.dumps(config_v2, indent=2) + "\n")


def keys() -> dict:
    from cryptography.hazmat.primitives.asymmetric.ed25519 import Ed25519PrivateKey

    write(FIXTURES / "aead.key", AEAD_KEY.hex() + "\n")
    write(FIXTURES / "signer.key", SIGNER_KEY.hex() + "\n")
    sk = Ed25519PrivateKey.from_private_bytes(SIGNER_KEY)
    pub_hex = sk.public_key().public_bytes_raw().hex()
    write(FIXTURES / "issuer_pub.hex", pub_hex + "\n")
    registry_config = {
        "listen": "127.0.0.1:8310",
        "tokens": {
            "vendor-token-1": {"role": "vendor", "vendor_id": "acme-analytics"},
            "auditor-token-1": {"role": "auditor", "auditor_id": "board-auditor-7"},
        },
        "issuer_keys": {"standards-board": pub_hex},
        "default_frequency_days": 365,
    }
    write(
        FIXTURES / "registry_config.json", json.dumps(registry_config, indent=2) + "\n"
    )
    return {"pub_hex": pub_hex, "key_id": public_key_id(sk.public_key())}


def run_cli(*argv: str) -> None:
    code = cli_main(list(argv))
    if code != 0:
        raise SystemExit(f"fixture CLI step failed ({code}): {argv}")


def goldens() -> None:
    six_out = FIXTURES / "golden_six_report.json"
    run_cli(
        "compute",
        "--input", str(FIXTURES / "six.csv"),
        "--config", str(FIXTURES / "six_config.json"),
        "--out", str(six_out),
        "--timestamp", T0,
    )
    hundred_out = FIXTURES / "golden_fairness_report.json"
    run_cli(
        "compute",
        "--input", str(FIXTURES / "fixture100.csv"),
        "--config", str(FIXTURES / "fixture100_config.json"),
        "--out", str(hundred_out),
        "--timestamp", T0,
    )
    audit_out = FIXTURES / "golden_audit_report.json"
    run_cli(
        "report",
        "--metrics", str(hundred_out),
        "--dataset-name", "credit-screening-eval",
        "--dataset", str(FIXTURES / "fixture100.csv"),
        "--snapshot", str(FIXTURES / "fixture100.csv"),
        "--key", str(FIXTURES / "aead.key"),
        "--service-id", "credit-screening",
        "--vendor-id", "acme-analytics",
        "--report-version", "1",
        "--out", str(audit_out),
        "--ciphertext-out", str(FIXTURES / "golden_snapshot.blob"),
        "--boc-issuer-id", "standards-board",
        "--boc-key", str(FIXTURES / "signer.key"),
        "--timestamp", T0,
        "--seed", "7",
    )
    # Second report for drift and history fixtures: same data, threshold 0.6.
    hundred_v2 = FIXTURES / "golden_fairness_report_v2.json"
    run_cli(
        "compute",
        "--input", str(FIXTURES / "fixture100.csv"),
        "--config", str(FIXTURES / "fixture100_config_v2.json"),
        "--out", str(hundred_v2),
        "--timestamp", T1,
    )
    audit_v2 = FIXTURES / "golden_audit_report_v2.json"
    run_cli(
        "report",
        "--metrics", str(hundred_v2),
        "--dataset-name", "credit-screening-eval",
        "--dataset", str(FIXTURES / "fixture100.csv"),
        "--snapshot", str(FIXTURES / "fixture100.csv"),
        "--key", str(FIXTURES / "aead.key"),
        "--service-id", "credit-screening",
        "--vendor-id", "acme-analytics",
        "--report-version", "2",
        "--out", str(audit_v2),
        "--ciphertext-out", str(FIXTURES / "golden_snapshot_v2.blob"),
        "--boc-issuer-id", "standards-board",
        "--boc-key", str(FIXTURES / "signer.key"),
        "--timestamp", T1,
        "--seed", "8",
    )
    digests = {
        "six_report": sha256_hex(six_out.read_bytes()),
        "fairness_report": sha256_hex(hundred_out.read_bytes()),
        "fairness_report_v2": sha256_hex(hundred_v2.read_bytes()),
        "audit_report": canonical_digest(
            {
                k: v
                for k, v in json.loads(audit_out.read_text()).items()
                if k not in ("audit_flag", "audit_history", "boc")
            }
        ),
        "audit_report_v2": canonical_digest(
            {
                k: v
                for k, v in json.loads(audit_v2.read_text()).items()
                if k not in ("audit_flag", "audit_history", "boc")
            }
        ),
        "snapshot_blob": sha256_hex((FIXTURES / "golden_snapshot.blob").read_bytes()),
        "dataset_file": sha256_hex((FIXTURES / "fixture100.csv").read_bytes()),
    }
    write(FIXTURES / "golden_digests.json", json.dumps(digests, indent=2) + "\n")


def ledger_fixture() -> None:
    path = FIXTURES / "ledger10.ndjson"
    if path.exists():
        path.unlink()
    ledger = Ledger(path)
    for i in range(10):
        ledger.append(
            canonical_digest({"n": i}),
            timestamp=f"2026-01-01T00:{i:02d}:00Z",
        )
    print(f"wrote {path.relative_to(ROOT)} ({path.stat().st_size} bytes)")


def frontend_payloads() -> None:
    """Capture live registry responses for the dashboard's offline tests."""
    import tempfile

    from fastapi.testclient import TestClient

    from fairlens.registry import ManualClock, RegistryStore, load_config
    from fairlens.registry.service import create_app

    with tempfile.TemporaryDirectory() as td:
        config = load_config(
            FIXTURES / "registry_config.json", env={"FAIRLENS_DATA_DIR": td}
        )
        clock = ManualClock(datetime(2026, 6, 10, tzinfo=timezone.utc))
        store = RegistryStore(config, clock=clock)
        client = TestClient(create_app(store))
        vendor = {"Authorization": "Bearer vendor-token-1"}
        auditor = {"Authorization": "Bearer auditor-token-1"}

        r = client.post(
            "/v1/services",
            json={
                "service_id": "credit-screening",
                "vendor_id": "acme-analytics",
                "display_name": "Credit screening model",
            },
            headers=vendor,
        )
        assert r.status_code == 201, r.text
        for name in ("golden_audit_report.json", "golden_audit_report_v2.json"):
            doc = json.loads((FIXTURES / name).read_text())
            r = client.post("/v1/reports", json=doc, headers=vendor)
            assert r.status_code == 201, r.text
        latest_digest = json.loads((FIXTURES / "golden_digests.json").read_text())[
            "audit_report_v2"
        ]
        r = client.post(
            f"/v1/reports/{latest_digest}/audits",
            json={"finding": "confirmed", "note": "re-ran metrics on escrowed snapshot"},
            headers=auditor,
        )
        assert r.status_code == 200, r.text

        def capture(name: str, path: str, params: dict | None = None) -> None:
            resp = client.get(path, params=params or {})
            assert resp.status_code == 200, f"{path}: {resp.status_code} {resp.text}"
            write(FRONTEND_FIXTURES / name, resp.text)

        capture("services.json", "/v1/services")
        capture("service.json", "/v1/services/credit-screening")
        capture("reports_list.json", "/v1/services/credit-screening/reports")
        capture("report_latest.json", f"/v1/reports/{latest_digest}")
        capture(
            "metrics_all.json",
            "/v1/services/credit-screening/metrics",
            {"criterion": "demographic_parity"},
        )
        capture(
            "metrics_sexF.json",
            "/v1/services/credit-screening/metrics",
            {"criterion": "demographic_parity", "attr.sex": "F"},
        )
        capture(
            "metrics_unknown_slice.json",
            "/v1/services/credit-screening/metrics",
            {"criterion": "demographic_parity", "attr.sex": "F", "attr.race": "white", "attr.income": "high"},
        )
        capture("badge.json", "/v1/services/credit-screening/badge")
        capture("ledger_verify.json", "/v1/ledger/verify")


def main() -> None:
    six_fixture()
    hundred_fixture()
    keys()
    goldens()
    ledger_fixture()
    frontend_payloads()
    print("fixtures complete")


if __name__ == "__main__":
    main()
