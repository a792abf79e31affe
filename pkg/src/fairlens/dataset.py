"""Labeled prediction datasets, slice filters, and CSV ingestion.

A dataset row carries a true binary outcome, a prediction (given directly or
derived from a score), and a map of categorical attribute values. Missing
attribute values are materialized as the reserved category ``"unspecified"``
so that unmeasured populations form a real, reportable group instead of being
silently dropped.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import MalformedDatasetError, ValidationError
from .rng import generator
from .timestamps import now_utc, parse_rfc3339

UNSPECIFIED = "unspecified"

__all__ = [
    "UNSPECIFIED",
    "LabeledRecord",
    "LabeledDataset",
    "SliceFilter",
    "load_dataset_csv",
    "subsample",
    "threshold_predictions",
]


@dataclass(frozen=True)
class LabeledRecord:
    """One labeled prediction with its categorical attribute values."""

    record_id: str
    y_true: int
    attributes: Mapping[str, str] = field(default_factory=dict)
    y_pred: int | None = None
    y_score: float | None = None

    def __post_init__(self) -> None:
        if not self.record_id:
            raise MalformedDatasetError("record_id must be a non-empty string")
        if self.y_true not in (0, 1):
            raise MalformedDatasetError(
                f"record {self.record_id!r}: y_true must be 0 or 1, got {self.y_true!r}"
            )
        if self.y_pred is not None and self.y_pred not in (0, 1):
            raise MalformedDatasetError(
                f"record {self.record_id!r}: y_pred must be 0 or 1, got {self.y_pred!r}"
            )
        if self.y_score is not None:
            if not isinstance(self.y_score, float) or not math.isfinite(self.y_score):
                raise MalformedDatasetError(
                    f"record {self.record_id!r}: y_score must be a finite float"
                )
            if not 0.0 <= self.y_score <= 1.0:
                raise MalformedDatasetError(
                    f"record {self.record_id!r}: y_score {self.y_score} outside [0, 1]"
                )
        normalized = {}
        for name, value in dict(self.attributes).items():
            if not isinstance(name, str) or not name:
                raise MalformedDatasetError(
                    f"record {self.record_id!r}: attribute names must be non-empty strings"
                )
            normalized[name] = value if isinstance(value, str) and value else UNSPECIFIED
        object.__setattr__(self, "attributes", normalized)

    def attribute(self, name: str) -> str:
        return self.attributes.get(name, UNSPECIFIED)


@dataclass(frozen=True)
class SliceFilter:
    """Conjunction of (attribute = value) clauses; empty means the whole population."""

    clauses: tuple[tuple[str, str], ...] = ()

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.clauses))
        names = [name for name, _ in ordered]
        if len(set(names)) != len(names):
            raise ValidationError(f"slice filter repeats an attribute: {names}")
        object.__setattr__(self, "clauses", ordered)

    @classmethod
    def of(cls, mapping: Mapping[str, str] | None = None, **clauses: str) -> "SliceFilter":
        merged = dict(mapping or {})
        merged.update(clauses)
        return cls(tuple(merged.items()))

    @property
    def attributes(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.clauses)

    def matches(self, record: LabeledRecord) -> bool:
        return all(record.attribute(name) == value for name, value in self.clauses)

    def with_clause(self, name: str, value: str) -> "SliceFilter":
        kept = tuple((n, v) for n, v in self.clauses if n != name)
        return SliceFilter(kept + ((name, value),))

    def to_doc(self) -> dict[str, str]:
        return dict(self.clauses)

    def __bool__(self) -> bool:
        return bool(self.clauses)


EMPTY_FILTER = SliceFilter()


@dataclass(frozen=True)
class LabeledDataset:
    """Ordered labeled records plus the attribute/feature declarations."""

    name: str
    records: tuple[LabeledRecord, ...]
    protected_attributes: tuple[str, ...] = ()
    declared_features: tuple[str, ...] = ()
    created_at: str = field(default_factory=now_utc)

    def __post_init__(self) -> None:
        records = tuple(self.records)
        protected = tuple(self.protected_attributes)
        if len(set(protected)) != len(protected):
            raise MalformedDatasetError("protected_attributes contains duplicates")
        parse_rfc3339(self.created_at)
        seen: set[str] = set()
        for record in records:
            if record.record_id in seen:
                raise MalformedDatasetError(f"duplicate record_id {record.record_id!r}")
            seen.add(record.record_id)
        # Materialize every protected attribute on every record.
        if protected:
            filled = []
            for record in records:
                missing = [a for a in protected if a not in record.attributes]
                if missing:
                    attrs = dict(record.attributes)
                    attrs.update({a: UNSPECIFIED for a in missing})
                    record = replace(record, attributes=attrs)
                filled.append(record)
            records = tuple(filled)
        object.__setattr__(self, "records", records)
        object.__setattr__(self, "protected_attributes", protected)
        object.__setattr__(self, "declared_features", tuple(self.declared_features))

    def __len__(self) -> int:
        return len(self.records)

    def matching(self, slice_filter: SliceFilter = EMPTY_FILTER) -> tuple[LabeledRecord, ...]:
        if not slice_filter:
            return self.records
        return tuple(r for r in self.records if slice_filter.matches(r))

    def observed_categories(
        self, attribute: str, slice_filter: SliceFilter = EMPTY_FILTER
    ) -> tuple[str, ...]:
        """Distinct values of *attribute* within the slice, sorted."""
        return tuple(sorted({r.attribute(attribute) for r in self.matching(slice_filter)}))

    def require_predictions(self) -> None:
        for record in self.records:
            if record.y_pred is None:
                raise MalformedDatasetError(
                    f"record {record.record_id!r} has no prediction; "
                    "apply threshold_predictions first"
                )


def threshold_predictions(dataset: LabeledDataset, threshold: float = 0.5) -> LabeledDataset:
    """Resolve scores into hard predictions: ``y_pred = 1`` iff score >= threshold.

    Records already carrying an explicit ``y_pred`` pass through unchanged; a
    record with neither a score nor a prediction is malformed.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError(f"threshold {threshold} outside [0, 1]")
    out = []
    for record in dataset.records:
        if record.y_pred is not None:
            out.append(record)
        elif record.y_score is not None:
            out.append(replace(record, y_pred=1 if record.y_score >= threshold else 0))
        else:
            raise MalformedDatasetError(
                f"record {record.record_id!r} has neither y_score nor y_pred"
            )
    return replace(dataset, records=tuple(out))


def subsample(dataset: LabeledDataset, fraction: float, seed: int) -> LabeledDataset:
    """Draw ``floor(fraction * n)`` records without replacement, seeded.

    Selection is invariant under input record permutation (ids are shuffled in
    sorted order); the returned records keep their original relative order.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValidationError(f"fraction {fraction} outside (0, 1]")
    n = len(dataset.records)
    keep = int(math.floor(fraction * n))
    ids = sorted(r.record_id for r in dataset.records)
    perm = generator(seed).permutation(n)
    chosen = {ids[i] for i in perm[:keep]}
    records = tuple(r for r in dataset.records if r.record_id in chosen)
    return replace(
        dataset,
        name=f"{dataset.name}[sample fraction={fraction} seed={seed}]",
        records=records,
    )


def _parse_binary(value: str, column: str, record_id: str) -> int:
    if value in ("0", "1"):
        return int(value)
    raise MalformedDatasetError(
        f"record {record_id!r}: column {column!r} must be 0 or 1, got {value!r}"
    )


def load_dataset_csv(
    path: str | Path,
    *,
    protected_attributes: Sequence[str],
    declared_features: Sequence[str] = (),
    name: str | None = None,
) -> LabeledDataset:
    """Load a UTF-8 CSV with header into a :class:`LabeledDataset`.

    Required columns: ``record_id``, ``y_true``, and at least one of
    ``y_pred`` / ``y_score``. Every other column becomes an attribute; empty
    cells read as ``"unspecified"``.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        missing = [c for c in ("record_id", "y_true") if c not in header]
        if missing:
            raise MalformedDatasetError(f"{path.name}: missing required columns {missing}")
        if "y_pred" not in header and "y_score" not in header:
            raise MalformedDatasetError(f"{path.name}: need a y_pred or y_score column")
        attribute_columns = [
            c for c in header if c not in ("record_id", "y_true", "y_pred", "y_score")
        ]
        records = []
        for row in reader:
            record_id = (row.get("record_id") or "").strip()
            if not record_id:
                raise MalformedDatasetError(f"{path.name}: row with empty record_id")
            y_true = _parse_binary((row.get("y_true") or "").strip(), "y_true", record_id)
            y_pred = None
            raw_pred = (row.get("y_pred") or "").strip()
            if raw_pred:
                y_pred = _parse_binary(raw_pred, "y_pred", record_id)
            y_score = None
            raw_score = (row.get("y_score") or "").strip()
            if raw_score:
                try:
                    y_score = float(raw_score)
                except ValueError:
                    raise MalformedDatasetError(
                        f"record {record_id!r}: y_score {raw_score!r} is not a number"
                    ) from None
            attributes = {c: (row.get(c) or "").strip() for c in attribute_columns}
            records.append(
                LabeledRecord(
                    record_id=record_id,
                    y_true=y_true,
                    y_pred=y_pred,
                    y_score=y_score,
                    attributes=attributes,
                )
            )
    return LabeledDataset(
        name=name or path.stem,
        records=tuple(records),
        protected_attributes=tuple(protected_attributes),
        declared_features=tuple(declared_features),
    )


def numeric_features(
    records: Iterable[LabeledRecord], features: Sequence[str]
) -> list[list[float]]:
    """Parse the named attributes of each record as floats.

    Raises :class:`MalformedDatasetError` for a missing or non-numeric cell,
    naming the record and feature.
    """
    rows = []
    for record in records:
        row = []
        for feature in features:
            raw = record.attributes.get(feature)
            if raw is None or raw == UNSPECIFIED:
                raise MalformedDatasetError(
                    f"record {record.record_id!r}: missing numeric feature {feature!r}"
                )
            try:
                row.append(float(raw))
            except ValueError:
                raise MalformedDatasetError(
                    f"record {record.record_id!r}: feature {feature!r}={raw!r} is not numeric"
                ) from None
        rows.append(row)
    return rows


def load_json_config(path: str | Path) -> dict:
    """Read a JSON key-value config document."""
    path = Path(path)
    try:
        with path.open(encoding="utf-8") as handle:
            doc = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path.name}: invalid JSON config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path.name}: config must be a JSON object")
    return doc
