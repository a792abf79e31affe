"""HTTP surface of the registry: JSON over HTTP/1.1, canonical report bodies.

Roles: vendors submit (bearer token bound to a vendor_id), auditors record
findings and draw samples, everything else is public. Stored reports are
served byte-identically so clients can re-derive and pin digests.
"""

from __future__ import annotations

import json

from fastapi import Depends, FastAPI, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..audit import FINDINGS, AuditReport
from ..errors import (
    ConflictError,
    FairlensError,
    NotFoundError,
    ValidationError,
)
from .config import RegistryConfig, TokenIdentity
from .store import RegistryStore

__all__ = ["create_app"]


class _HttpError(Exception):
    def __init__(self, status: int, detail: str):
        self.status = status
        self.detail = detail


def _identity(request: Request, config: RegistryConfig) -> TokenIdentity | None:
    header = request.headers.get("authorization", "")
    if not header:
        return None
    scheme, _, token = header.partition(" ")
    if scheme.lower() != "bearer" or not token:
        raise _HttpError(401, "authorization header must be 'Bearer <token>'")
    identity = config.tokens.get(token.strip())
    if identity is None:
        raise _HttpError(401, "unknown token")
    return identity


def create_app(store: RegistryStore) -> FastAPI:
    app = FastAPI(title="fairness registry", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["GET", "POST"],
        allow_headers=["Authorization", "Content-Type"],
    )

    def require_vendor(request: Request) -> TokenIdentity:
        identity = _identity(request, store.config)
        if identity is None:
            raise _HttpError(401, "this endpoint requires a vendor token")
        if identity.role != "vendor":
            raise _HttpError(403, "this endpoint requires the vendor role")
        return identity

    def require_auditor(request: Request) -> TokenIdentity:
        identity = _identity(request, store.config)
        if identity is None:
            raise _HttpError(401, "this endpoint requires an auditor token")
        if identity.role != "auditor":
            raise _HttpError(403, "this endpoint requires the auditor role")
        return identity

    @app.exception_handler(_HttpError)
    async def on_http_error(request: Request, exc: _HttpError):
        return JSONResponse(status_code=exc.status, content={"detail": exc.detail})

    @app.exception_handler(FairlensError)
    async def on_domain_error(request: Request, exc: FairlensError):
        status = 400
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, ConflictError):
            status = 409
        return JSONResponse(status_code=status, content={"detail": str(exc)})

    async def read_json(request: Request) -> dict:
        try:
            doc = json.loads(await request.body())
        except ValueError:
            raise _HttpError(400, "request body is not valid JSON") from None
        if not isinstance(doc, dict):
            raise _HttpError(400, "request body must be a JSON object")
        return doc

    @app.post("/v1/services", status_code=201)
    async def register_service(request: Request, identity: TokenIdentity = Depends(require_vendor)):
        doc = await read_json(request)
        vendor_id = doc.get("vendor_id", identity.vendor_id)
        if vendor_id != identity.vendor_id:
            raise _HttpError(403, f"token may not register services for vendor {vendor_id!r}")
        return store.register_service(
            service_id=doc.get("service_id", ""),
            vendor_id=vendor_id,
            display_name=doc.get("display_name") or doc.get("service_id", ""),
            frequency_days=doc.get("audit_frequency_days"),
        )

    @app.get("/v1/services")
    async def list_services():
        return {"services": store.list_services()}

    @app.get("/v1/services/{service_id}")
    async def get_service(service_id: str):
        return store.get_service(service_id)

    @app.post("/v1/reports")
    async def submit_report(
        request: Request, identity: TokenIdentity = Depends(require_vendor)
    ):
        doc = await read_json(request)
        report = AuditReport.from_doc(doc)
        outcome = store.submit_report(report, vendor_id=identity.vendor_id)
        body = {"digest": outcome.digest, "ledger_index": outcome.ledger_index}
        return JSONResponse(status_code=201 if outcome.created else 200, content=body)

    @app.get("/v1/reports/{digest}")
    async def get_report(digest: str):
        return Response(
            content=store.report_document_bytes(digest),
            media_type="application/json",
        )

    @app.get("/v1/services/{service_id}/reports")
    async def list_reports(
        service_id: str,
        cursor: str | None = Query(default=None),
        limit: int = Query(default=20),
    ):
        items, next_cursor = store.list_reports(service_id, cursor=cursor, limit=limit)
        return {"items": items, "next_cursor": next_cursor}

    @app.post("/v1/reports/{digest}/audits")
    async def record_audit(
        digest: str, request: Request, identity: TokenIdentity = Depends(require_auditor)
    ):
        doc = await read_json(request)
        finding = doc.get("finding")
        if finding not in FINDINGS:
            raise _HttpError(400, f"finding must be one of {list(FINDINGS)}")
        return store.record_audit_event(
            digest=digest,
            auditor_id=identity.auditor_id,
            finding=finding,
            note=str(doc.get("note", "")),
        )

    @app.get("/v1/services/{service_id}/metrics")
    async def query_metrics(
        service_id: str, request: Request, criterion: str | None = Query(default=None)
    ):
        clauses: dict[str, str] = {}
        for key in request.query_params:
            if key == "criterion":
                continue
            if key.startswith("attr."):
                name = key[5:]
                values = request.query_params.getlist(key)
                if not name:
                    raise _HttpError(422, "filter parameter with empty attribute name")
                if len(set(values)) > 1:
                    raise _HttpError(
                        422, f"conflicting values for filter attribute {name!r}"
                    )
                clauses[name] = values[0]
        return store.query_metrics(service_id, clauses, criterion)

    @app.get("/v1/services/{service_id}/badge")
    async def badge(service_id: str):
        return store.badge(service_id)

    @app.get("/v1/ledger")
    async def ledger_entries(
        from_: int = Query(default=0, alias="from", ge=0),
        limit: int = Query(default=100, ge=1, le=1000),
    ):
        entries = store.ledger.entries(start=from_, limit=limit)
        return {
            "entries": [e.to_doc() for e in entries],
            "from": from_,
            "length": len(store.ledger),
        }

    @app.get("/v1/ledger/verify")
    async def ledger_verify():
        return store.verify().to_doc()

    @app.get("/v1/audit-sample")
    async def audit_sample(
        n: int = Query(ge=1),
        seed: int = Query(ge=0),
        identity: TokenIdentity = Depends(require_auditor),
    ):
        return store.audit_sample(n=n, seed=seed)

    return app
