"""Command-line interface for vendors and auditors.

Exit codes: 0 success, 1 operational failure (unreachable registry, a check
that did not pass), 2 usage or validation errors. Machine-readable JSON goes
to stdout; diagnostics go to stderr. Output files are written as exact
canonical bytes so a file's SHA-256 equals its document's content digest.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

from .audit import build_audit_report, with_boc
from .canonical import canonical_bytes, canonical_dumps, sha256_hex
from .crypto import encrypt_snapshot, issue_boc, load_signing_key, load_verify_key, read_key_file, verify_boc
from .dataset import (
    EMPTY_FILTER,
    LabeledDataset,
    SliceFilter,
    load_dataset_csv,
    load_json_config,
    threshold_predictions,
)
from .errors import (
    AuthenticationFailure,
    FairlensError,
    ValidationError,
)
from .ledger import verify_chain
from .metrics import AwarenessConfig
from .permutation import PERMUTATION_METRICS, permutation_test
from .report import DEFAULT_SLICE_DEPTH, EngineConfig, FairnessReport, compute_report, drift
from .slicing import dataset_slices, enumerate_slices
from . import audit as audit_mod

__all__ = ["entrypoint", "main"]


def _emit(doc: dict, fmt: str) -> None:
    if fmt == "table":
        for line in _table_lines(doc, ""):
            print(line)
    else:
        print(canonical_dumps(doc))


def _table_lines(value, prefix: str):
    if isinstance(value, dict):
        for k in sorted(value):
            yield from _table_lines(value[k], f"{prefix}{k}." if prefix else f"{k}.")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            yield from _table_lines(v, f"{prefix}{i}.")
    else:
        yield f"{prefix[:-1]:<48} {value}"


def _parse_slice(pairs: list[str] | None) -> SliceFilter:
    f = EMPTY_FILTER
    for pair in pairs or []:
        name, sep, value = pair.partition("=")
        if not sep or not name or not value:
            raise ValidationError(f"slice clause must be attribute=value, got {pair!r}")
        f = f.with_clause(name, value)
    return f


def _load_dataset(input_path: str, cfg: dict) -> LabeledDataset:
    protected = cfg.get("protected_attributes")
    if not protected:
        raise ValidationError("config must name protected_attributes")
    return load_dataset_csv(
        input_path,
        protected_attributes=protected,
        declared_features=cfg.get("declared_features", ()),
        name=cfg.get("dataset_name") or Path(input_path).stem,
    )


def _engine_config(cfg: dict, seed: int | None) -> EngineConfig:
    awareness = None
    if cfg.get("awareness"):
        a = cfg["awareness"]
        awareness = AwarenessConfig(
            features=tuple(a["features"]),
            lipschitz_bound=float(a["lipschitz_bound"]),
            normalize=bool(a.get("normalize", True)),
            max_records=int(a.get("max_records", 5000)),
        )
    return EngineConfig(
        threshold=float(cfg.get("threshold", 0.5)),
        min_support=int(cfg.get("min_support", 30)),
        seed=seed if seed is not None else int(cfg.get("seed", 0)),
        slice_depth=int(cfg.get("slice_depth", DEFAULT_SLICE_DEPTH)),
        gap_threshold=cfg.get("gap_threshold"),
        awareness=awareness,
    )


def _load_fairness_report(path: str) -> FairnessReport:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(doc, dict) and doc.get("schema") == audit_mod.AUDIT_REPORT_SCHEMA:
        doc = doc.get("fairness_report")
    return FairnessReport.from_doc(doc)


# -- commands ---------------------------------------------------------------


def cmd_compute(args) -> int:
    cfg = load_json_config(args.config)
    dataset = _load_dataset(args.input, cfg)
    criteria = cfg.get("criteria")
    if not criteria:
        raise ValidationError("config must select criteria explicitly")
    report = compute_report(
        dataset,
        criteria,
        attributes=cfg.get("attributes"),
        slice_filter=_parse_slice(args.slice),
        config=_engine_config(cfg, args.seed),
        timestamp=args.timestamp,
    )
    data = canonical_bytes(report.to_doc())
    Path(args.out).write_bytes(data)
    _emit(
        {
            "out": args.out,
            "digest": report.digest(),
            "record_count": report.record_count,
            "results": len(report.results),
            "slices": len(report.slices),
        },
        args.format,
    )
    return 0


def cmd_report(args) -> int:
    fairness = _load_fairness_report(args.metrics)
    key = read_key_file(args.key)
    plaintext = Path(args.snapshot).read_bytes()
    ciphertext, info = encrypt_snapshot(plaintext, key, seed=args.seed)
    if args.dataset is not None:
        dataset_digest = sha256_hex(Path(args.dataset).read_bytes())
    elif args.dataset_digest is not None:
        dataset_digest = args.dataset_digest
    else:
        raise ValidationError("pass --dataset FILE or --dataset-digest HEX")
    report = build_audit_report(
        service_id=args.service_id,
        vendor_id=args.vendor_id,
        report_version=args.report_version,
        dataset_name=args.dataset_name,
        dataset_digest=dataset_digest,
        snapshot=info,
        fairness_report=fairness,
        timestamp=args.timestamp,
    )
    if args.boc_key is not None:
        if args.boc_issuer_id is None:
            raise ValidationError("--boc-key requires --boc-issuer-id")
        boc = issue_boc(
            report.digest(),
            args.boc_issuer_id,
            load_signing_key(args.boc_key),
            issued_at=args.timestamp,
        )
        report = with_boc(report, boc)
    ciphertext_out = args.ciphertext_out or args.out + ".blob"
    Path(args.out).write_bytes(canonical_bytes(report.to_doc()))
    Path(ciphertext_out).write_bytes(ciphertext)
    _emit(
        {
            "out": args.out,
            "digest": report.digest(),
            "ciphertext_out": ciphertext_out,
            "ciphertext_digest": info.ciphertext_digest,
            "certified": report.boc is not None,
        },
        args.format,
    )
    return 0


def cmd_submit(args) -> int:
    data = Path(args.report).read_bytes()
    url = args.registry.rstrip("/") + "/v1/reports"
    try:
        response = httpx.post(
            url,
            content=data,
            headers={
                "Authorization": f"Bearer {args.token}",
                "Content-Type": "application/json",
            },
            timeout=30.0,
        )
    except httpx.HTTPError as exc:
        print(f"registry unreachable: {exc}", file=sys.stderr)
        return 1
    if response.status_code not in (200, 201):
        print(f"submission rejected ({response.status_code}): {response.text}", file=sys.stderr)
        return 1
    body = response.json()
    _emit(
        {
            "digest": body["digest"],
            "ledger_index": body["ledger_index"],
            "url": args.registry.rstrip("/") + "/v1/reports/" + body["digest"],
        },
        args.format,
    )
    return 0


def cmd_verify(args) -> int:
    data = Path(args.report).read_bytes()
    checks: dict[str, bool] = {}
    reasons: list[str] = []

    try:
        doc = json.loads(data)
        report = audit_mod.AuditReport.from_doc(doc)
        checks["structure"] = True
    except (ValueError, FairlensError) as exc:
        print(f"report file invalid: {exc}", file=sys.stderr)
        _emit({"ok": False, "checks": {"structure": False}}, args.format)
        return 1

    canonical = canonical_bytes(report.to_doc())
    checks["canonical_bytes"] = data == canonical
    if not checks["canonical_bytes"]:
        reasons.append("file bytes differ from the canonical form of their own content")

    digest = report.digest()
    if args.digest is not None:
        checks["digest"] = digest == args.digest
        if not checks["digest"]:
            reasons.append(f"content digest {digest} does not match expected {args.digest}")

    if args.boc:
        if report.boc is None:
            checks["boc"] = False
            reasons.append("report carries no certificate")
        elif args.issuer_key is None:
            raise ValidationError("--boc requires --issuer-key HEX")
        else:
            checks["boc"] = verify_boc(report.boc, load_verify_key(args.issuer_key), digest)
            if not checks["boc"]:
                reasons.append("certificate does not verify over this report's digest")

    if args.ledger is not None:
        checks["ledger"] = _check_ledger(args.ledger, digest, reasons)
    if args.ledger_file is not None:
        outcome = verify_chain(args.ledger_file)
        present = any(
            e.payload_digest == digest for e in _local_entries(args.ledger_file, outcome.ok)
        )
        checks["ledger"] = outcome.ok and present
        if not outcome.ok:
            reasons.append(
                f"local ledger fails at index {outcome.first_bad_index}: {outcome.reason}"
            )
        elif not present:
            reasons.append("report digest not present in the local ledger")

    ok = all(checks.values())
    for reason in reasons:
        print(reason, file=sys.stderr)
    _emit({"ok": ok, "digest": digest, "checks": checks}, args.format)
    return 0 if ok else 1


def _local_entries(path: str, ok: bool):
    if not ok:
        return []
    from .ledger import Ledger

    return Ledger(path).entries()


def _check_ledger(registry: str, digest: str, reasons: list[str]) -> bool:
    base = registry.rstrip("/")
    try:
        outcome = httpx.get(base + "/v1/ledger/verify", timeout=30.0)
        outcome.raise_for_status()
        verdict = outcome.json()
        if not verdict.get("ok"):
            reasons.append(
                f"registry ledger fails at index {verdict.get('first_bad_index')}: "
                f"{verdict.get('reason')}"
            )
            return False
        start = 0
        while True:
            page = httpx.get(
                base + "/v1/ledger", params={"from": start, "limit": 1000}, timeout=30.0
            )
            page.raise_for_status()
            body = page.json()
            entries = body["entries"]
            if any(e["payload_digest"] == digest for e in entries):
                return True
            start += len(entries)
            if not entries or start >= body["length"]:
                reasons.append("report digest not present in the registry ledger")
                return False
    except httpx.HTTPError as exc:
        reasons.append(f"registry unreachable: {exc}")
        return False


def cmd_enumerate(args) -> int:
    if args.attributes is not None:
        enumeration = enumerate_slices(
            tuple(f"a{i}" for i in range(args.attributes)), max_depth=args.max_depth
        )
        doc = {
            "attributes": args.attributes,
            "ordering_count": enumeration.ordering_count,
            "subset_count": enumeration.subset_count,
        }
    else:
        if args.input is None or args.config is None:
            raise ValidationError("pass --attributes K, or --input CSV with --config FILE")
        cfg = load_json_config(args.config)
        dataset = _load_dataset(args.input, cfg)
        enumeration = dataset_slices(dataset, max_depth=args.max_depth)
        doc = {
            "attributes": len(enumeration.attributes),
            "attribute_names": list(enumeration.attributes),
            "ordering_count": enumeration.ordering_count,
            "subset_count": enumeration.subset_count,
            "slice_count": enumeration.slice_count(),
            "max_depth": enumeration.depth,
        }
    _emit(doc, args.format)
    return 0


def cmd_permtest(args) -> int:
    cfg = load_json_config(args.config) if args.config else {}
    if args.config:
        dataset = _load_dataset(args.input, cfg)
    else:
        dataset = load_dataset_csv(
            args.input, protected_attributes=[args.attribute], name=Path(args.input).stem
        )
    if any(r.y_pred is None for r in dataset.records):
        dataset = threshold_predictions(dataset, float(cfg.get("threshold", 0.5)))
    result = permutation_test(
        dataset, args.attribute, args.metric, n_permutations=args.n, seed=args.seed
    )
    _emit(result.to_doc(), args.format)
    return 0


def cmd_drift(args) -> int:
    previous = _load_fairness_report(args.previous)
    current = _load_fairness_report(args.current)
    result = drift(previous, current, drift_threshold=args.threshold)
    _emit(result.to_doc(), args.format)
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from .registry import RegistryStore, create_app, load_config

    env = dict(os.environ)
    if args.data_dir is not None:
        env["FAIRLENS_DATA_DIR"] = args.data_dir
    if args.listen is not None:
        env["FAIRLENS_LISTEN"] = args.listen
    config = load_config(args.config, env=env)
    store = RegistryStore(config)
    print(
        f"serving registry on {config.listen_host}:{config.listen_port} "
        f"(data: {config.data_dir})",
        file=sys.stderr,
    )
    uvicorn.run(create_app(store), host=config.listen_host, port=config.listen_port)
    return 0


def cmd_audit_sample(args) -> int:
    try:
        response = httpx.get(
            args.registry.rstrip("/") + "/v1/audit-sample",
            params={"n": args.n, "seed": args.seed},
            headers={"Authorization": f"Bearer {args.token}"},
            timeout=30.0,
        )
    except httpx.HTTPError as exc:
        print(f"registry unreachable: {exc}", file=sys.stderr)
        return 1
    if response.status_code != 200:
        print(f"request failed ({response.status_code}): {response.text}", file=sys.stderr)
        return 1
    _emit(response.json(), args.format)
    return 0


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairlens",
        description="Compute fairness metrics, publish audit reports, verify the public record.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("json", "table"), default="json")

    p = sub.add_parser("compute", help="evaluate criteria over a CSV dataset")
    p.add_argument("--input", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--slice", action="append", metavar="ATTR=VALUE")
    p.add_argument("--timestamp")
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(fn=cmd_compute)

    p = sub.add_parser("report", help="wrap computed metrics into a publishable report")
    p.add_argument("--metrics", required=True)
    p.add_argument("--dataset-name", required=True)
    p.add_argument("--snapshot", required=True)
    p.add_argument("--key", required=True)
    p.add_argument("--service-id", required=True)
    p.add_argument("--vendor-id", required=True)
    p.add_argument("--report-version", type=int, default=1)
    p.add_argument("--dataset")
    p.add_argument("--dataset-digest")
    p.add_argument("--out", required=True)
    p.add_argument("--ciphertext-out")
    p.add_argument("--boc-issuer-id")
    p.add_argument("--boc-key")
    p.add_argument("--timestamp")
    p.add_argument("--seed", type=int)
    common(p)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("submit", help="post a report to a registry")
    p.add_argument("--report", required=True)
    p.add_argument("--registry", required=True)
    p.add_argument("--token", required=True)
    common(p)
    p.set_defaults(fn=cmd_submit)

    p = sub.add_parser("verify", help="check a report's integrity claims")
    p.add_argument("--report", required=True)
    p.add_argument("--digest")
    p.add_argument("--boc", action="store_true")
    p.add_argument("--issuer-key")
    p.add_argument("--ledger", metavar="REGISTRY_URL")
    p.add_argument("--ledger-file")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("enumerate", help="count orderings, subsets, and slices")
    p.add_argument("--attributes", type=int)
    p.add_argument("--input")
    p.add_argument("--config")
    p.add_argument("--max-depth", type=int, default=DEFAULT_SLICE_DEPTH)
    common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("permtest", help="permutation test of a between-group gap")
    p.add_argument("--input", required=True)
    p.add_argument("--attribute", required=True)
    p.add_argument("--metric", choices=PERMUTATION_METRICS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--config")
    common(p)
    p.set_defaults(fn=cmd_permtest)

    p = sub.add_parser("drift", help="compare two reports' metrics")
    p.add_argument("--previous", required=True)
    p.add_argument("--current", required=True)
    p.add_argument("--threshold", type=float, required=True)
    common(p)
    p.set_defaults(fn=cmd_drift)

    p = sub.add_parser("serve", help="run the registry service")
    p.add_argument("--config")
    p.add_argument("--data-dir")
    p.add_argument("--listen", metavar="HOST:PORT")
    common(p)
    p.set_defaults(fn=cmd_serve)

    p = sub.add_parser("audit-sample", help="draw a seeded sample of services to probe")
    p.add_argument("--registry", required=True)
    p.add_argument("--token", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_audit_sample)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except AuthenticationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    except FairlensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except httpx.HTTPError as exc:
        print(f"network failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
