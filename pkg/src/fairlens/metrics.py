"""Group fairness metrics over labeled predictions.

Every rate follows the standard confusion-matrix formulas. A rate whose
denominator is empty is an explicit ``None`` carried through results and
excluded from gaps with an annotation; it is never NaN and never a silent
zero. Groups are the observed categories of one protected attribute inside
the active slice, including the reserved ``"unspecified"`` category.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .dataset import EMPTY_FILTER, LabeledDataset, LabeledRecord, SliceFilter, numeric_features
from .errors import CapacityError, ConfigurationError
from .canonical import INF

DEFAULT_MIN_SUPPORT = 30
PAIR_SCAN_CAP = 5000
RATIO_TOLERANCE = 1e-12

DEMOGRAPHIC_PARITY = "demographic_parity"
EQUALIZED_OPPORTUNITY = "equalized_opportunity"
EQUALIZED_ODDS = "equalized_odds"
UNAWARENESS = "unawareness"
AWARENESS = "awareness"

GROUPED_CRITERIA = (DEMOGRAPHIC_PARITY, EQUALIZED_OPPORTUNITY, EQUALIZED_ODDS)

__all__ = [
    "AWARENESS",
    "AwarenessConfig",
    "ConfusionCounts",
    "CustomCriterion",
    "DEFAULT_MIN_SUPPORT",
    "DEMOGRAPHIC_PARITY",
    "EQUALIZED_ODDS",
    "EQUALIZED_OPPORTUNITY",
    "GROUPED_CRITERIA",
    "GroupMetrics",
    "LipschitzCheckResult",
    "MetricResult",
    "PAIR_SCAN_CAP",
    "UNAWARENESS",
    "UnawarenessResult",
    "awareness_check",
    "confusion",
    "custom_metric",
    "demographic_parity",
    "equalized_odds",
    "equalized_opportunity",
    "group_metrics",
    "unawareness_check",
]


@dataclass(frozen=True)
class ConfusionCounts:
    """TP/FP/TN/FN cell counts for one slice."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def support(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(dataset: LabeledDataset, slice_filter: SliceFilter = EMPTY_FILTER) -> ConfusionCounts:
    """Count confusion cells over exactly the records matching the slice."""
    dataset.require_predictions()
    tp = fp = tn = fn = 0
    for record in dataset.matching(slice_filter):
        if record.y_true == 1:
            if record.y_pred == 1:
                tp += 1
            else:
                fn += 1
        else:
            if record.y_pred == 1:
                fp += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def _rate(numerator: int, denominator: int) -> float | None:
    return None if denominator == 0 else numerator / denominator


@dataclass(frozen=True)
class GroupMetrics:
    """Derived rates for one group; ``None`` marks an empty denominator."""

    positive_rate: float | None
    tpr: float | None
    fpr: float | None
    fnr: float | None
    accuracy: float | None
    support: int
    low_support_warning: bool

    def to_doc(self) -> dict:
        return {
            "positive_rate": self.positive_rate,
            "tpr": self.tpr,
            "fpr": self.fpr,
            "fnr": self.fnr,
            "accuracy": self.accuracy,
            "support": self.support,
            "low_support_warning": self.low_support_warning,
        }


def group_metrics(counts: ConfusionCounts, min_support: int = DEFAULT_MIN_SUPPORT) -> GroupMetrics:
    """Rates from counts; flags statistically fragile groups, never excludes them."""
    return GroupMetrics(
        positive_rate=_rate(counts.tp + counts.fp, counts.support),
        tpr=_rate(counts.tp, counts.tp + counts.fn),
        fpr=_rate(counts.fp, counts.fp + counts.tn),
        fnr=_rate(counts.fn, counts.fn + counts.tp),
        accuracy=_rate(counts.tp + counts.tn, counts.support),
        support=counts.support,
        low_support_warning=counts.support < min_support,
    )


@dataclass(frozen=True)
class MetricResult:
    """Per-group values for one criterion, with the between-group gap and ratio.

    ``gap`` is max minus min over the defined group values (``None`` with
    fewer than two defined groups); ``ratio`` is min over max (``None`` when
    the max is zero). Groups whose value is undefined are listed with a
    reason and excluded from both.
    """

    criterion: str
    attribute: str | None
    group_values: Mapping[str, float | None]
    gap: float | None
    ratio: float | None
    undefined_groups: tuple[tuple[str, str], ...] = ()
    passed: bool | None = None
    details: Mapping[str, object] = field(default_factory=dict)

    def to_doc(self) -> dict:
        return {
            "criterion": self.criterion,
            "attribute": self.attribute,
            "status": "ok",
            "group_values": dict(self.group_values),
            "gap": self.gap,
            "ratio": self.ratio,
            "undefined_groups": [
                {"group": g, "reason": r} for g, r in self.undefined_groups
            ],
            "passed": self.passed,
            "details": dict(self.details),
        }


def _gap_and_ratio(values: Mapping[str, float | None]) -> tuple[float | None, float | None]:
    defined = [v for v in values.values() if v is not None]
    if len(defined) < 2:
        return None, None
    high, low = max(defined), min(defined)
    gap = high - low
    ratio = None if high == 0 else low / high
    return gap, ratio


def _check_attribute(dataset: LabeledDataset, attribute: str) -> None:
    if attribute not in dataset.protected_attributes:
        raise ConfigurationError(
            f"attribute {attribute!r} is not declared protected "
            f"(declared: {list(dataset.protected_attributes)})"
        )


def _per_group(
    dataset: LabeledDataset,
    attribute: str,
    slice_filter: SliceFilter,
    min_support: int,
) -> dict[str, GroupMetrics]:
    _check_attribute(dataset, attribute)
    dataset.require_predictions()
    groups = dataset.observed_categories(attribute, slice_filter)
    return {
        g: group_metrics(confusion(dataset, slice_filter.with_clause(attribute, g)), min_support)
        for g in groups
    }


def _grouped_result(
    criterion: str,
    attribute: str,
    per_group: Mapping[str, GroupMetrics],
    value_of: Callable[[GroupMetrics], float | None],
    undefined_reason: str,
    gap_threshold: float | None,
    details: dict | None = None,
) -> MetricResult:
    values = {g: value_of(m) for g, m in per_group.items()}
    undefined = tuple((g, undefined_reason) for g, v in sorted(values.items()) if v is None)
    if len([v for v in values.values() if v is not None]) < 2:
        undefined += (("*", "fewer than 2 defined groups; gap and ratio undefined"),)
    gap, ratio = _gap_and_ratio(values)
    passed = None if gap is None or gap_threshold is None else gap <= gap_threshold
    info = dict(details or {})
    low = sorted(g for g, m in per_group.items() if m.low_support_warning)
    info["low_support_groups"] = low
    info["group_support"] = {g: m.support for g, m in per_group.items()}
    return MetricResult(
        criterion=criterion,
        attribute=attribute,
        group_values=values,
        gap=gap,
        ratio=ratio,
        undefined_groups=undefined,
        passed=passed,
        details=info,
    )


def demographic_parity(
    dataset: LabeledDataset,
    attribute: str,
    slice_filter: SliceFilter = EMPTY_FILTER,
    min_support: int = DEFAULT_MIN_SUPPORT,
    gap_threshold: float | None = None,
) -> MetricResult:
    """Equal positive-prediction rate across the attribute's groups."""
    per_group = _per_group(dataset, attribute, slice_filter, min_support)
    return _grouped_result(
        DEMOGRAPHIC_PARITY,
        attribute,
        per_group,
        lambda m: m.positive_rate,
        "empty group",
        gap_threshold,
    )


def equalized_opportunity(
    dataset: LabeledDataset,
    attribute: str,
    slice_filter: SliceFilter = EMPTY_FILTER,
    min_support: int = DEFAULT_MIN_SUPPORT,
    gap_threshold: float | None = None,
) -> MetricResult:
    """Equal true positive rate TP/(TP+FN) across the attribute's groups."""
    per_group = _per_group(dataset, attribute, slice_filter, min_support)
    return _grouped_result(
        EQUALIZED_OPPORTUNITY,
        attribute,
        per_group,
        lambda m: m.tpr,
        "no positive ground-truth records in group",
        gap_threshold,
    )


def equalized_odds(
    dataset: LabeledDataset,
    attribute: str,
    slice_filter: SliceFilter = EMPTY_FILTER,
    min_support: int = DEFAULT_MIN_SUPPORT,
    gap_threshold: float | None = None,
) -> MetricResult:
    """Equal TPR and FPR across groups; gap is the worse of the two gaps.

    The FNR gap is also emitted; since FNR = 1 - TPR over the same
    denominator it always equals the TPR gap exactly.
    """
    per_group = _per_group(dataset, attribute, slice_filter, min_support)
    tpr_values = {g: m.tpr for g, m in per_group.items()}
    fpr_values = {g: m.fpr for g, m in per_group.items()}
    fnr_values = {g: m.fnr for g, m in per_group.items()}
    tpr_gap, tpr_ratio = _gap_and_ratio(tpr_values)
    fpr_gap, fpr_ratio = _gap_and_ratio(fpr_values)
    # max(1-t) - min(1-t) == max(t) - min(t); reuse the TPR gap rather than
    # re-deriving it from the per-group FNR floats, which can drift an ulp.
    fnr_gap = tpr_gap

    undefined = tuple(
        (g, "no positive ground-truth records in group")
        for g, v in sorted(tpr_values.items())
        if v is None
    ) + tuple(
        (g, "no negative ground-truth records in group")
        for g, v in sorted(fpr_values.items())
        if v is None
    )
    defined_gaps = [g for g in (tpr_gap, fpr_gap) if g is not None]
    gap = max(defined_gaps) if defined_gaps else None
    if gap is None:
        undefined += (("*", "fewer than 2 defined groups; gap and ratio undefined"),)
    ratios = [r for r in (tpr_ratio, fpr_ratio) if r is not None]
    ratio = min(ratios) if ratios else None
    passed = None
    if gap is not None and gap_threshold is not None:
        passed = gap <= gap_threshold
    low = sorted(g for g, m in per_group.items() if m.low_support_warning)
    return MetricResult(
        criterion=EQUALIZED_ODDS,
        attribute=attribute,
        group_values=tpr_values,
        gap=gap,
        ratio=ratio,
        undefined_groups=undefined,
        passed=passed,
        details={
            "tpr": dict(tpr_values),
            "fpr": dict(fpr_values),
            "fnr": dict(fnr_values),
            "tpr_gap": tpr_gap,
            "fpr_gap": fpr_gap,
            "fnr_gap": fnr_gap,
            "low_support_groups": low,
            "group_support": {g: m.support for g, m in per_group.items()},
        },
    )


@dataclass(frozen=True)
class CustomCriterion:
    """User-defined group score: a named function from a group's records to a value.

    ``fn`` receives the records of one (slice, group) cell and returns a float
    or ``None`` when undefined for that group. ``board_approved`` mirrors the
    standardization flag surfaced on dashboards; it defaults to unapproved.
    """

    name: str
    fn: Callable[[Sequence[LabeledRecord]], float | None]
    board_approved: bool = False

    @property
    def criterion_id(self) -> str:
        return f"custom:{self.name}"


def custom_metric(
    dataset: LabeledDataset,
    criterion: CustomCriterion,
    attribute: str,
    slice_filter: SliceFilter = EMPTY_FILTER,
    min_support: int = DEFAULT_MIN_SUPPORT,
    gap_threshold: float | None = None,
) -> MetricResult:
    """Evaluate a user-defined group score across the attribute's groups."""
    _check_attribute(dataset, attribute)
    groups = dataset.observed_categories(attribute, slice_filter)
    values: dict[str, float | None] = {}
    supports: dict[str, int] = {}
    for g in groups:
        members = dataset.matching(slice_filter.with_clause(attribute, g))
        supports[g] = len(members)
        # Canonical order shields the result from input record permutation.
        raw = criterion.fn(tuple(sorted(members, key=lambda r: r.record_id)))
        values[g] = float(raw) if raw is not None else None
    undefined = tuple(
        (g, "custom metric undefined for group") for g, v in sorted(values.items()) if v is None
    )
    if len([v for v in values.values() if v is not None]) < 2:
        undefined += (("*", "fewer than 2 defined groups; gap and ratio undefined"),)
    gap, ratio = _gap_and_ratio(values)
    passed = None if gap is None or gap_threshold is None else gap <= gap_threshold
    return MetricResult(
        criterion=criterion.criterion_id,
        attribute=attribute,
        group_values=values,
        gap=gap,
        ratio=ratio,
        undefined_groups=undefined,
        passed=passed,
        details={
            "custom": True,
            "board_approved": criterion.board_approved,
            "low_support_groups": sorted(g for g, s in supports.items() if s < min_support),
            "group_support": supports,
        },
    )


@dataclass(frozen=True)
class UnawarenessResult:
    """Whether the declared model features avoid every protected attribute."""

    compliant: bool | None
    offending_features: tuple[str, ...]
    indeterminate: bool = False

    def to_doc(self) -> dict:
        return {
            "criterion": UNAWARENESS,
            "status": "ok",
            "compliant": self.compliant,
            "offending_features": list(self.offending_features),
            "indeterminate": self.indeterminate,
        }


def unawareness_check(dataset: LabeledDataset) -> UnawarenessResult:
    """Flag declared model features that name a protected attribute.

    Name comparison is case-insensitive after trimming. An empty feature
    declaration yields an indeterminate result rather than a verdict.
    """
    declared = [f.strip() for f in dataset.declared_features]
    if not declared:
        return UnawarenessResult(compliant=None, offending_features=(), indeterminate=True)
    protected = {a.strip().lower(): a for a in dataset.protected_attributes}
    offending = tuple(sorted({f for f in declared if f.lower() in protected}))
    return UnawarenessResult(compliant=not offending, offending_features=offending)


@dataclass(frozen=True)
class AwarenessConfig:
    """Similarity configuration for the individual-fairness check.

    Distance is L2 over the named numeric features, min-max normalized per
    feature by default. A constant feature normalizes to zero everywhere and
    contributes nothing to the distance.
    """

    features: tuple[str, ...]
    lipschitz_bound: float
    normalize: bool = True
    max_records: int = PAIR_SCAN_CAP

    def to_doc(self) -> dict:
        return {
            "features": list(self.features),
            "lipschitz_bound": self.lipschitz_bound,
            "normalize": self.normalize,
            "max_records": self.max_records,
        }


@dataclass(frozen=True)
class LipschitzCheckResult:
    """Outcome of the similar-individuals-similar-outputs scan.

    ``max_ratio`` is infinite when two records with identical features
    received different outputs; such pairs violate any bound.
    """

    lipschitz_bound: float
    violations: int
    max_ratio: float
    pairs_checked: int

    def to_doc(self) -> dict:
        return {
            "criterion": AWARENESS,
            "status": "ok",
            "lipschitz_bound": self.lipschitz_bound,
            "violations": self.violations,
            "max_ratio": INF if math.isinf(self.max_ratio) else self.max_ratio,
            "pairs_checked": self.pairs_checked,
        }


def awareness_check(dataset: LabeledDataset, config: AwarenessConfig) -> LipschitzCheckResult:
    """Scan all record pairs for outputs changing faster than the bound allows.

    A pair violates when |out_i - out_j| / d(i, j) exceeds the bound (beyond a
    1e-12 comparison tolerance), or when d = 0 with differing outputs. Outputs
    are scores when every record has one, hard predictions otherwise. The scan
    is O(n^2) and capped; subsample larger datasets first.
    """
    if config.lipschitz_bound < 0:
        raise ConfigurationError("lipschitz_bound must be >= 0")
    if not config.features:
        raise ConfigurationError("awareness check requires at least one feature")
    n = len(dataset.records)
    if n > config.max_records:
        raise CapacityError(
            f"{n} records exceed the {config.max_records}-record pair-scan cap; "
            "subsample the dataset first"
        )
    features = np.asarray(numeric_features(dataset.records, config.features), dtype=float)
    if config.normalize and n > 0:
        low = features.min(axis=0)
        span = features.max(axis=0) - low
        span[span == 0.0] = 1.0
        features = (features - low) / span
    if all(r.y_score is not None for r in dataset.records):
        outputs = np.asarray([r.y_score for r in dataset.records], dtype=float)
    else:
        dataset.require_predictions()
        outputs = np.asarray([r.y_pred for r in dataset.records], dtype=float)

    violations = 0
    max_ratio = 0.0
    pairs = 0
    bound = config.lipschitz_bound
    for i in range(n - 1):
        d = np.sqrt(((features[i + 1 :] - features[i]) ** 2).sum(axis=1))
        out = np.abs(outputs[i + 1 :] - outputs[i])
        pairs += d.shape[0]
        zero = d == 0.0
        identical_violations = int((out[zero] > RATIO_TOLERANCE).sum())
        violations += identical_violations
        if identical_violations:
            max_ratio = math.inf
        ratios = out[~zero] / d[~zero]
        if ratios.size:
            max_ratio = max(max_ratio, float(ratios.max()))
            violations += int((ratios > bound + RATIO_TOLERANCE).sum())
    return LipschitzCheckResult(
        lipschitz_bound=bound,
        violations=violations,
        max_ratio=max_ratio,
        pairs_checked=pairs,
    )
