"""Full vendor-to-auditor round trip against a registry on localhost.

Starts the registry in a background thread with a throwaway data directory,
then drives the same CLI commands a vendor and an auditor would run.

    python3 demos/registry_round_trip.py
"""

import json
import tempfile
import threading
import time
from pathlib import Path

import httpx
import uvicorn

from fairlens.cli import main as cli
from fairlens.registry import RegistryStore, load_config
from fairlens.registry.service import create_app

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
workdir = Path(tempfile.mkdtemp(prefix="registry-demo-"))

# -- start the registry -------------------------------------------------------

config = load_config(
    FIXTURES / "registry_config.json",
    env={"FAIRLENS_DATA_DIR": str(workdir / "registry-data")},
)
store = RegistryStore(config)
server = uvicorn.Server(
    uvicorn.Config(create_app(store), host="127.0.0.1", port=0, log_level="error")
)
thread = threading.Thread(target=server.run, daemon=True)
thread.start()
while not server.started:
    time.sleep(0.01)
port = server.servers[0].sockets[0].getsockname()[1]
base = f"http://127.0.0.1:{port}"
print(f"registry listening on {base}")

vendor = {"Authorization": "Bearer vendor-token-1"}
httpx.post(
    base + "/v1/services",
    json={"service_id": "credit-screening", "vendor_id": "acme-analytics"},
    headers=vendor,
).raise_for_status()
print("registered service credit-screening for vendor acme-analytics\n")

# -- vendor side: compute metrics, wrap them, submit --------------------------

# Explicit timestamps keep the run reproducible; versions must move forward
# in time for the audit bookkeeping below to see v2 as the newer report.
metrics_path = workdir / "metrics.json"
cli([
    "compute",
    "--input", str(FIXTURES / "fixture100.csv"),
    "--config", str(FIXTURES / "fixture100_config.json"),
    "--out", str(metrics_path),
    "--timestamp", "2026-01-05T00:00:00Z",
])

report_path = workdir / "audit_report.json"
cli([
    "report",
    "--metrics", str(metrics_path),
    "--dataset-name", "credit-screening-eval",
    "--dataset", str(FIXTURES / "fixture100.csv"),
    "--snapshot", str(FIXTURES / "fixture100.csv"),
    "--key", str(FIXTURES / "aead.key"),
    "--service-id", "credit-screening",
    "--vendor-id", "acme-analytics",
    "--out", str(report_path),
    "--boc-issuer-id", "standards-board",
    "--boc-key", str(FIXTURES / "signer.key"),
    "--timestamp", "2026-01-05T00:00:00Z",
    "--seed", "7",
])

cli([
    "submit",
    "--report", str(report_path),
    "--registry", base,
    "--token", "vendor-token-1",
])
print()

# -- anyone: query the public record ------------------------------------------

badge = httpx.get(base + "/v1/services/credit-screening/badge").json()
print(f"badge: {badge['status']}  (certificate valid: {badge['boc_valid']})")

metrics = httpx.get(
    base + "/v1/services/credit-screening/metrics", params={"attr.sex": "F"}
).json()
print(f"metrics within sex=F: user_count={metrics['user_count']}")
for item in metrics["results"]:
    if item["status"] == "ok":
        print(f"  {item['criterion']} by {item['attribute']}: gap={item['gap']}")
print()

# -- auditor side: flag then clear --------------------------------------------

digest = badge["latest_report_digest"]
auditor = {"Authorization": "Bearer auditor-token-1"}
flagged = httpx.post(
    base + f"/v1/reports/{digest}/audits",
    json={"finding": "discrepancy", "note": "could not reproduce the TPR table"},
    headers=auditor,
).json()
print(f"after a discrepancy finding, badge: {flagged['status']}")

# The vendor publishes a corrected report; a later confirmed finding on it
# restores the badge.
cli([
    "compute",
    "--input", str(FIXTURES / "fixture100.csv"),
    "--config", str(FIXTURES / "fixture100_config_v2.json"),
    "--out", str(metrics_path),
    "--timestamp", "2026-06-01T00:00:00Z",
])
cli([
    "report",
    "--metrics", str(metrics_path),
    "--dataset-name", "credit-screening-eval",
    "--dataset", str(FIXTURES / "fixture100.csv"),
    "--snapshot", str(FIXTURES / "fixture100.csv"),
    "--key", str(FIXTURES / "aead.key"),
    "--service-id", "credit-screening",
    "--vendor-id", "acme-analytics",
    "--report-version", "2",
    "--out", str(report_path),
    "--boc-issuer-id", "standards-board",
    "--boc-key", str(FIXTURES / "signer.key"),
    "--timestamp", "2026-06-01T00:00:00Z",
    "--seed", "8",
])
cli(["submit", "--report", str(report_path), "--registry", base, "--token", "vendor-token-1"])

new_digest = httpx.get(base + "/v1/services/credit-screening/badge").json()[
    "latest_report_digest"
]
# Audit events are stamped with second resolution; a clearing finding has to
# be recorded strictly later than the discrepancy it answers.
time.sleep(1.1)
cleared = httpx.post(
    base + f"/v1/reports/{new_digest}/audits",
    json={"finding": "confirmed", "note": "v2 reproduces"},
    headers=auditor,
).json()
print(f"after a confirmed finding on the corrected report: {cleared['status']}")

verdict = httpx.get(base + "/v1/ledger/verify").json()
print(f"\npublic ledger: ok={verdict['ok']} length={verdict['length']}")

server.should_exit = True
thread.join(timeout=5)
