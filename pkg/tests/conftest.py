"""Shared fixtures and a brute-force counting oracle for the metric tests."""

from __future__ import annotations

import json
import random
from fractions import Fraction
from pathlib import Path

import pytest

from fairlens import LabeledDataset, LabeledRecord

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def golden_digests() -> dict:
    return json.loads((FIXTURES / "golden_digests.json").read_text())


def make_dataset(rows, name="t", protected=("g",), **kwargs) -> LabeledDataset:
    """rows: iterable of (y_true, y_pred, group) or (y_true, y_pred, {attrs})."""
    records = []
    for i, row in enumerate(rows):
        y_true, y_pred, attrs = row
        if not isinstance(attrs, dict):
            attrs = {"g": str(attrs)}
        records.append(
            LabeledRecord(
                record_id=f"r{i:04d}",
                y_true=int(y_true),
                y_pred=None if y_pred is None else int(y_pred),
                attributes={k: str(v) for k, v in attrs.items()},
            )
        )
    return LabeledDataset(
        name=name, records=tuple(records), protected_attributes=tuple(protected), **kwargs
    )


def random_dataset(rng: random.Random, max_n=200, max_groups=4) -> LabeledDataset:
    n = rng.randint(1, max_n)
    k = rng.randint(1, max_groups)
    groups = [f"g{j}" for j in range(k)]
    rows = [
        (rng.randint(0, 1), rng.randint(0, 1), rng.choice(groups)) for _ in range(n)
    ]
    return make_dataset(rows)


class OracleCell:
    """Counts for one (group) cell, tallied record by record."""

    def __init__(self):
        self.tp = self.fp = self.tn = self.fn = 0

    def add(self, y_true: int, y_pred: int) -> None:
        if y_true == 1 and y_pred == 1:
            self.tp += 1
        elif y_true == 0 and y_pred == 1:
            self.fp += 1
        elif y_true == 0 and y_pred == 0:
            self.tn += 1
        else:
            self.fn += 1

    @property
    def support(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def rate(self, which: str):
        num_den = {
            "positive_rate": (self.tp + self.fp, self.support),
            "tpr": (self.tp, self.tp + self.fn),
            "fpr": (self.fp, self.fp + self.tn),
            "fnr": (self.fn, self.fn + self.tp),
            "accuracy": (self.tp + self.tn, self.support),
        }[which]
        num, den = num_den
        if den == 0:
            return None
        return num / den


def oracle_counts(dataset: LabeledDataset, attribute: str) -> dict[str, OracleCell]:
    cells: dict[str, OracleCell] = {}
    for record in dataset.records:
        group = record.attribute(attribute)
        cells.setdefault(group, OracleCell()).add(record.y_true, record.y_pred)
    return cells


def oracle_gap(values: dict[str, float | None]) -> float | None:
    defined = [v for v in values.values() if v is not None]
    if len(defined) < 2:
        return None
    return max(defined) - min(defined)


def exact_rate(num: int, den: int) -> Fraction | None:
    """Exact rational rate for cross-checking float results."""
    return None if den == 0 else Fraction(num, den)
