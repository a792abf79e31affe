"""Two-sample permutation test for between-group performance differences.

The observed statistic is the absolute gap of one rate between the two
groups of a binary attribute. Group labels are reshuffled with the seeded
generator; the p-value uses add-one smoothing, (b + 1) / (n + 1), so a
finite number of permutations never reports zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset
from .errors import ConfigurationError, DegenerateInputError, ValidationError
from .rng import RNG_ALGORITHM, SHUFFLE_PROCEDURE, generator

PERMUTATION_METRICS = ("positive_rate", "tpr", "fpr", "accuracy")
_BATCH_ELEMENTS = 4_000_000

__all__ = ["PERMUTATION_METRICS", "PermutationTestResult", "permutation_test"]


@dataclass(frozen=True)
class PermutationTestResult:
    metric_name: str
    statistic: float
    p_value: float
    n_permutations: int
    seed: int
    groups: tuple[str, str]

    def to_doc(self) -> dict:
        return {
            "metric_name": self.metric_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "n_permutations": self.n_permutations,
            "seed": self.seed,
            "groups": list(self.groups),
            "rng": RNG_ALGORITHM,
            "shuffle": SHUFFLE_PROCEDURE,
        }


def _metric_arrays(records, metric: str) -> tuple[np.ndarray, np.ndarray]:
    """Per-record numerator and denominator masks for the chosen rate."""
    true = np.asarray([r.y_true for r in records], dtype=np.float64)
    pred = np.asarray([r.y_pred for r in records], dtype=np.float64)
    if metric == "positive_rate":
        return pred, np.ones_like(pred)
    if metric == "accuracy":
        return (pred == true).astype(np.float64), np.ones_like(pred)
    if metric == "tpr":
        return pred * true, true
    if metric == "fpr":
        return pred * (1.0 - true), 1.0 - true
    raise ConfigurationError(
        f"metric {metric!r} not supported; choose one of {list(PERMUTATION_METRICS)}"
    )


def permutation_test(
    dataset: LabeledDataset,
    attribute: str,
    metric: str,
    n_permutations: int,
    seed: int,
) -> PermutationTestResult:
    """Seeded permutation test of the metric gap across a binary attribute.

    Identical inputs and seed give a bit-identical result regardless of input
    record order. A permuted assignment on which the rate is undefined counts
    as at least as extreme as the observed gap (conservative).
    """
    if attribute not in dataset.protected_attributes:
        raise ConfigurationError(f"attribute {attribute!r} is not declared protected")
    if n_permutations < 1:
        raise ValidationError(f"n_permutations must be >= 1, got {n_permutations}")
    dataset.require_predictions()
    groups = dataset.observed_categories(attribute)
    if len(groups) != 2:
        raise ConfigurationError(
            f"permutation test needs exactly 2 observed categories of {attribute!r}, "
            f"got {len(groups)}: {list(groups)}"
        )
    # Canonical record order makes the result invariant to input permutation.
    records = sorted(dataset.records, key=lambda r: r.record_id)
    membership = np.asarray([r.attribute(attribute) == groups[0] for r in records], dtype=bool)
    n_first = int(membership.sum())
    n = len(records)
    numer, denom = _metric_arrays(records, metric)

    def gap(first_mask: np.ndarray) -> float:
        d1 = float(denom[first_mask].sum())
        d2 = float(denom[~first_mask].sum())
        if d1 == 0.0 or d2 == 0.0:
            raise DegenerateInputError(
                f"{metric} is undefined on one of the observed groups of {attribute!r}"
            )
        return abs(numer[first_mask].sum() / d1 - numer[~first_mask].sum() / d2)

    observed = gap(membership)

    rng = generator(seed)
    extreme = 0
    batch = max(1, min(n_permutations, _BATCH_ELEMENTS // max(n, 1)))
    base = np.broadcast_to(np.arange(n), (batch, n))
    done = 0
    while done < n_permutations:
        rows = min(batch, n_permutations - done)
        perms = rng.permuted(np.ascontiguousarray(base[:rows]), axis=1)
        first = perms[:, :n_first]
        rest = perms[:, n_first:]
        with np.errstate(divide="ignore", invalid="ignore"):
            stat = np.abs(
                numer[first].sum(axis=1) / denom[first].sum(axis=1)
                - numer[rest].sum(axis=1) / denom[rest].sum(axis=1)
            )
        undefined = np.isnan(stat)
        extreme += int(undefined.sum())
        extreme += int((stat[~undefined] >= observed).sum())
        done += rows
    p_value = (extreme + 1) / (n_permutations + 1)
    return PermutationTestResult(
        metric_name=metric,
        statistic=float(observed),
        p_value=p_value,
        n_permutations=n_permutations,
        seed=seed,
        groups=(groups[0], groups[1]),
    )
