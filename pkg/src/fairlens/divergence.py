"""Distribution distances between categorical distributions.

KL and JS divergences are reported in natural log units; the JS upper bound
is ln 2. KL on disjoint support is a legitimate audit finding and surfaces
as an infinite value (serialized as the ``"inf"`` sentinel), never an error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .canonical import INF
from .dataset import EMPTY_FILTER, LabeledDataset, SliceFilter
from .errors import ConfigurationError, ValidationError

LOG_BASE = "e"
LN2 = math.log(2.0)
NORMALIZATION_TOLERANCE = 1e-9

__all__ = ["DivergenceResult", "LN2", "LOG_BASE", "attribute_distribution", "divergence"]


@dataclass(frozen=True)
class DivergenceResult:
    """KL, JS, total variation, and L-p distance over one categorical domain."""

    kl: float
    js: float
    tv: float
    lp: float
    p_order: float
    support_labels: tuple[str, ...]

    def to_doc(self) -> dict:
        return {
            "kl": INF if math.isinf(self.kl) else self.kl,
            "js": self.js,
            "tv": self.tv,
            "lp": self.lp,
            "p_order": self.p_order,
            "support_labels": list(self.support_labels),
            "log_base": LOG_BASE,
        }


def _as_aligned(
    p: Mapping[str, float] | Sequence[float], q: Mapping[str, float] | Sequence[float]
) -> tuple[tuple[str, ...], list[float], list[float]]:
    if isinstance(p, Mapping) != isinstance(q, Mapping):
        raise ConfigurationError("p and q must both be mappings or both be sequences")
    if isinstance(p, Mapping):
        if set(p) != set(q):
            raise ConfigurationError(
                f"label sets differ: {sorted(set(p) ^ set(q))} not shared by both"
            )
        labels = tuple(sorted(p))
        return labels, [float(p[l]) for l in labels], [float(q[l]) for l in labels]
    if len(p) != len(q):
        raise ConfigurationError(f"length mismatch: {len(p)} vs {len(q)}")
    labels = tuple(str(i) for i in range(len(p)))
    return labels, [float(x) for x in p], [float(x) for x in q]


def _validate(name: str, values: Sequence[float]) -> None:
    if any(v < 0 for v in values):
        raise ValidationError(f"{name} has a negative entry")
    total = math.fsum(values)
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        raise ValidationError(f"{name} is not normalized: entries sum to {total!r}")


def _kl(p: Sequence[float], q: Sequence[float]) -> float:
    total = 0.0
    for pi, qi in zip(p, q):
        if pi == 0.0:
            continue
        if qi == 0.0:
            return math.inf
        total += pi * math.log(pi / qi)
    return max(total, 0.0)  # Gibbs; clears float residue like -1e-17


def _clamp(value: float, low: float, high: float) -> float:
    # Tolerate only floating residue from nearly-normalized inputs.
    if low - NORMALIZATION_TOLERANCE < value < low:
        return low
    if high < value < high + NORMALIZATION_TOLERANCE:
        return high
    return value


def divergence(
    p: Mapping[str, float] | Sequence[float],
    q: Mapping[str, float] | Sequence[float],
    p_order: float = 2.0,
) -> DivergenceResult:
    """All four distances between two distributions over the same label set.

    Inputs must be non-negative and sum to one within 1e-9. Mappings are
    aligned by label; sequences by position.
    """
    if p_order < 1.0:
        raise ValidationError(f"p_order must be >= 1, got {p_order}")
    labels, pv, qv = _as_aligned(p, q)
    _validate("p", pv)
    _validate("q", qv)
    mid = [(pi + qi) / 2.0 for pi, qi in zip(pv, qv)]
    js = _clamp(0.5 * _kl(pv, mid) + 0.5 * _kl(qv, mid), 0.0, LN2)
    diffs = [abs(pi - qi) for pi, qi in zip(pv, qv)]
    tv = _clamp(0.5 * math.fsum(diffs), 0.0, 1.0)
    lp = math.fsum(d**p_order for d in diffs) ** (1.0 / p_order)
    return DivergenceResult(
        kl=_kl(pv, qv), js=js, tv=tv, lp=lp, p_order=p_order, support_labels=labels
    )


def attribute_distribution(
    dataset: LabeledDataset,
    attribute: str,
    slice_filter: SliceFilter = EMPTY_FILTER,
    labels: Sequence[str] | None = None,
) -> dict[str, float]:
    """Empirical category distribution of one attribute within a slice.

    Pass *labels* to pin the support when comparing two slices whose observed
    categories differ (unseen labels get probability zero).
    """
    records = dataset.matching(slice_filter)
    if not records:
        raise ValidationError("cannot build a distribution over an empty slice")
    domain = tuple(labels) if labels is not None else dataset.observed_categories(attribute)
    counts = {label: 0 for label in domain}
    for record in records:
        value = record.attribute(attribute)
        if value not in counts:
            raise ConfigurationError(
                f"value {value!r} of {attribute!r} missing from the pinned label set"
            )
        counts[value] += 1
    n = len(records)
    return {label: counts[label] / n for label in domain}
