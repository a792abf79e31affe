"""Report assembly: all selected criteria over a dataset, plus drift deltas.

A report is a plain serializable document. Its canonical bytes are the
publication format, and its digest is the content address under which a
registry stores it. Slices up to a declared depth are precomputed here, at
report time, because the registry never sees raw records.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .canonical import canonical_digest
from .dataset import EMPTY_FILTER, LabeledDataset, SliceFilter, threshold_predictions
from .divergence import LOG_BASE
from .errors import FairlensError, ValidationError
from .metrics import (
    AWARENESS,
    DEFAULT_MIN_SUPPORT,
    DEMOGRAPHIC_PARITY,
    EQUALIZED_ODDS,
    EQUALIZED_OPPORTUNITY,
    GROUPED_CRITERIA,
    UNAWARENESS,
    AwarenessConfig,
    CustomCriterion,
    awareness_check,
    custom_metric,
    demographic_parity,
    equalized_odds,
    equalized_opportunity,
    unawareness_check,
)
from .rng import RNG_ALGORITHM, SHUFFLE_PROCEDURE
from .slicing import enumerate_slices
from .timestamps import now_utc, parse_rfc3339

ENGINE_VERSION = "0.1.0"
REPORT_SCHEMA = "fairness-report/1"
DEFAULT_SLICE_DEPTH = 2

__all__ = [
    "DEFAULT_SLICE_DEPTH",
    "DriftResult",
    "ENGINE_VERSION",
    "EngineConfig",
    "FairnessReport",
    "REPORT_SCHEMA",
    "compute_report",
    "drift",
]

_GROUPED_FNS = {
    DEMOGRAPHIC_PARITY: demographic_parity,
    EQUALIZED_OPPORTUNITY: equalized_opportunity,
    EQUALIZED_ODDS: equalized_odds,
}


@dataclass(frozen=True)
class EngineConfig:
    """Tunables echoed verbatim into every report for reproducibility."""

    threshold: float = 0.5
    min_support: int = DEFAULT_MIN_SUPPORT
    seed: int = 0
    slice_depth: int = DEFAULT_SLICE_DEPTH
    gap_threshold: float | None = None
    awareness: AwarenessConfig | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValidationError(f"threshold must be in [0,1], got {self.threshold}")
        if self.min_support < 0:
            raise ValidationError(f"min_support must be >= 0, got {self.min_support}")
        if self.slice_depth < 0:
            raise ValidationError(f"slice_depth must be >= 0, got {self.slice_depth}")
        if self.gap_threshold is not None and self.gap_threshold < 0:
            raise ValidationError(f"gap_threshold must be >= 0, got {self.gap_threshold}")


def _echo(config: EngineConfig, criteria_ids: Sequence[str], attributes: Sequence[str]) -> dict:
    return {
        "criteria": list(criteria_ids),
        "attributes": list(attributes),
        "threshold": config.threshold,
        "min_support": config.min_support,
        "seed": config.seed,
        "slice_depth": config.slice_depth,
        "gap_threshold": config.gap_threshold,
        "awareness": config.awareness.to_doc() if config.awareness else None,
        "rng": RNG_ALGORITHM,
        "shuffle": SHUFFLE_PROCEDURE,
        "log_base": LOG_BASE,
    }


@dataclass(frozen=True)
class FairnessReport:
    """One evaluation run over one dataset, ready for canonical serialization."""

    engine_version: str
    dataset_name: str
    record_count: int
    created_at: str
    config: dict
    base_slice: dict
    results: tuple[dict, ...]
    slices: tuple[dict, ...]

    def to_doc(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "engine_version": self.engine_version,
            "dataset_name": self.dataset_name,
            "record_count": self.record_count,
            "created_at": self.created_at,
            "config": self.config,
            "base_slice": self.base_slice,
            "results": list(self.results),
            "slices": list(self.slices),
        }

    def digest(self) -> str:
        return canonical_digest(self.to_doc())

    @classmethod
    def from_doc(cls, doc: Mapping) -> "FairnessReport":
        if not isinstance(doc, Mapping):
            raise ValidationError("fairness report document must be an object")
        if doc.get("schema") != REPORT_SCHEMA:
            raise ValidationError(
                f"unsupported report schema {doc.get('schema')!r}, expected {REPORT_SCHEMA!r}"
            )
        try:
            report = cls(
                engine_version=doc["engine_version"],
                dataset_name=doc["dataset_name"],
                record_count=doc["record_count"],
                created_at=doc["created_at"],
                config=dict(doc["config"]),
                base_slice=dict(doc["base_slice"]),
                results=tuple(doc["results"]),
                slices=tuple(doc["slices"]),
            )
        except KeyError as exc:
            raise ValidationError(f"fairness report missing field {exc.args[0]!r}") from None
        if not isinstance(report.record_count, int) or report.record_count < 0:
            raise ValidationError("record_count must be a non-negative integer")
        parse_rfc3339(report.created_at)
        return report


def _normalize_criteria(
    criteria: Iterable[str | CustomCriterion],
) -> tuple[tuple[str | CustomCriterion, ...], tuple[str, ...]]:
    items = tuple(criteria)
    if not items:
        raise ValidationError("criteria must be selected explicitly; none given")
    known = set(GROUPED_CRITERIA) | {UNAWARENESS, AWARENESS}
    ids = []
    for c in items:
        if isinstance(c, CustomCriterion):
            ids.append(c.criterion_id)
        elif isinstance(c, str) and c in known:
            ids.append(c)
        else:
            raise ValidationError(f"unknown criterion {c!r}; known: {sorted(known)}")
    if len(set(ids)) != len(ids):
        raise ValidationError("criteria contain duplicates")
    return items, tuple(ids)


def _error_item(criterion_id: str, attribute: str | None, exc: Exception) -> dict:
    return {
        "criterion": criterion_id,
        "attribute": attribute,
        "status": "error",
        "error": f"{type(exc).__name__}: {exc}",
    }


def _grouped_items(
    dataset: LabeledDataset,
    criteria: Sequence[str | CustomCriterion],
    attributes: Sequence[str],
    slice_filter: SliceFilter,
    config: EngineConfig,
) -> list[dict]:
    """One result per (groupable criterion, free attribute), errors inline."""
    items: list[dict] = []
    for criterion in criteria:
        if isinstance(criterion, str) and criterion not in _GROUPED_FNS:
            continue
        for attribute in attributes:
            if attribute in slice_filter.attributes:
                continue
            try:
                if isinstance(criterion, CustomCriterion):
                    result = custom_metric(
                        dataset, criterion, attribute, slice_filter,
                        config.min_support, config.gap_threshold,
                    )
                else:
                    result = _GROUPED_FNS[criterion](
                        dataset, attribute, slice_filter,
                        config.min_support, config.gap_threshold,
                    )
                items.append(result.to_doc())
            except FairlensError as exc:
                cid = criterion.criterion_id if isinstance(criterion, CustomCriterion) else criterion
                items.append(_error_item(cid, attribute, exc))
    return items


def compute_report(
    dataset: LabeledDataset,
    criteria: Iterable[str | CustomCriterion],
    attributes: Sequence[str] | None = None,
    slice_filter: SliceFilter = EMPTY_FILTER,
    config: EngineConfig | None = None,
    *,
    timestamp: str | None = None,
) -> FairnessReport:
    """Evaluate the selected criteria and assemble the publishable report.

    Each (criterion, attribute) item succeeds or fails independently; a
    failed item stays in the report with its error message, so one
    degenerate group never voids the rest of the evaluation. Re-running on
    a record-permuted copy of the dataset reproduces the report exactly,
    apart from the timestamp.
    """
    config = config or EngineConfig()
    items, criteria_ids = _normalize_criteria(criteria)
    attrs = tuple(attributes) if attributes is not None else dataset.protected_attributes
    if not attrs:
        raise ValidationError("no attributes to group by")
    created_at = timestamp if timestamp is not None else now_utc()
    parse_rfc3339(created_at)

    work = dataset
    if any(r.y_pred is None for r in dataset.records):
        try:
            work = threshold_predictions(dataset, config.threshold)
        except FairlensError:
            # Leave resolution errors to surface per item; unawareness and
            # friends can still succeed on a score-free dataset.
            work = dataset

    results = _grouped_items(work, items, attrs, slice_filter, config)
    for criterion in items:
        if criterion == UNAWARENESS:
            try:
                results.append(unawareness_check(work).to_doc())
            except FairlensError as exc:
                results.append(_error_item(UNAWARENESS, None, exc))
        elif criterion == AWARENESS:
            try:
                if config.awareness is None:
                    raise ValidationError(
                        "awareness criterion selected but no awareness config given"
                    )
                results.append(awareness_check(work, config.awareness).to_doc())
            except FairlensError as exc:
                results.append(_error_item(AWARENESS, None, exc))

    groupable = [
        c for c in items
        if isinstance(c, CustomCriterion) or c in _GROUPED_FNS
    ]
    slices = []
    slices.append(
        {
            "filter": {},
            "user_count": len(work.matching(slice_filter)),
            "results": [r for r in results if r.get("attribute") is not None],
        }
    )
    free = tuple(a for a in attrs if a not in slice_filter.attributes)
    if groupable and free and config.slice_depth >= 1:
        enumeration = enumerate_slices(
            free,
            {a: work.observed_categories(a) for a in free},
            max_depth=config.slice_depth,
        )
        for sub in enumeration.slices():
            merged = slice_filter
            for name in sub.attributes:
                merged = merged.with_clause(name, dict(sub.clauses)[name])
            slices.append(
                {
                    "filter": sub.to_doc(),
                    "user_count": len(work.matching(merged)),
                    "results": _grouped_items(work, groupable, attrs, merged, config),
                }
            )

    return FairnessReport(
        engine_version=ENGINE_VERSION,
        dataset_name=dataset.name,
        record_count=len(dataset.records),
        created_at=created_at,
        config=_echo(config, criteria_ids, attrs),
        base_slice=slice_filter.to_doc(),
        results=tuple(results),
        slices=tuple(slices),
    )


@dataclass(frozen=True)
class DriftResult:
    """Metric movement between two reports of the same service."""

    drift_threshold: float
    deltas: tuple[dict, ...]
    structural: tuple[str, ...]
    alert: bool
    compared_report_digests: tuple[str, str]

    def to_doc(self) -> dict:
        return {
            "drift_threshold": self.drift_threshold,
            "deltas": list(self.deltas),
            "structural": list(self.structural),
            "alert": self.alert,
            "compared_report_digests": list(self.compared_report_digests),
        }


def _headline(report: FairnessReport) -> dict[tuple[str, str], dict]:
    out = {}
    for item in report.results:
        if item.get("status") == "ok" and item.get("attribute") is not None:
            out[(item["criterion"], item["attribute"])] = item
    return out


def drift(
    previous: FairnessReport,
    current: FairnessReport,
    drift_threshold: float,
) -> DriftResult:
    """Per-group and per-gap deltas (current minus previous) with one alert bit.

    A group, metric, or defined value present on only one side is structural
    drift and alerts regardless of the threshold: the populations being
    measured changed, not just the numbers.
    """
    if drift_threshold < 0:
        raise ValidationError(f"drift_threshold must be >= 0, got {drift_threshold}")
    prev_items = _headline(previous)
    cur_items = _headline(current)
    deltas: list[dict] = []
    structural: list[str] = []
    exceeded = False

    for key in sorted(set(prev_items) - set(cur_items)):
        structural.append(f"metric {key[0]} on {key[1]} dropped from the current report")
    for key in sorted(set(cur_items) - set(prev_items)):
        structural.append(f"metric {key[0]} on {key[1]} is new in the current report")

    for key in sorted(set(prev_items) & set(cur_items)):
        criterion, attribute = key
        p, c = prev_items[key], cur_items[key]
        p_groups, c_groups = dict(p["group_values"]), dict(c["group_values"])
        group_deltas: dict[str, float] = {}
        for g in sorted(set(p_groups) - set(c_groups)):
            structural.append(f"{criterion}/{attribute}: group {g!r} dropped")
        for g in sorted(set(c_groups) - set(p_groups)):
            structural.append(f"{criterion}/{attribute}: group {g!r} is new")
        for g in sorted(set(p_groups) & set(c_groups)):
            pv, cv = p_groups[g], c_groups[g]
            if pv is None and cv is None:
                continue
            if pv is None or cv is None:
                structural.append(
                    f"{criterion}/{attribute}: group {g!r} changed definedness"
                )
                continue
            d = cv - pv
            group_deltas[g] = d
            if abs(d) > drift_threshold:
                exceeded = True
        gap_delta = None
        if p["gap"] is None and c["gap"] is not None or p["gap"] is not None and c["gap"] is None:
            structural.append(f"{criterion}/{attribute}: gap changed definedness")
        elif p["gap"] is not None and c["gap"] is not None:
            gap_delta = c["gap"] - p["gap"]
            if abs(gap_delta) > drift_threshold:
                exceeded = True
        deltas.append(
            {
                "criterion": criterion,
                "attribute": attribute,
                "gap_delta": gap_delta,
                "group_deltas": group_deltas,
            }
        )

    return DriftResult(
        drift_threshold=drift_threshold,
        deltas=tuple(deltas),
        structural=tuple(structural),
        alert=exceeded or bool(structural),
        compared_report_digests=(previous.digest(), current.digest()),
    )
