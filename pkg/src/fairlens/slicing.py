"""Intersectional slice enumeration and its combinatorics.

For k attributes there are k! attribute orderings and 2^k - 1 non-empty
attribute subsets; the slices actually scored are each subset's category
cross-product. Both counts are exposed because reporting cost depends on the
counting scheme. Enumeration order is deterministic: attributes in declared
order, subsets by size then lexicographic position.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping

from .dataset import LabeledDataset, SliceFilter
from .errors import ConfigurationError

__all__ = ["SliceEnumeration", "dataset_slices", "enumerate_slices"]


@dataclass(frozen=True)
class SliceEnumeration:
    """Lazily enumerable intersectional slices over declared attributes."""

    attributes: tuple[str, ...]
    categories: Mapping[str, tuple[str, ...]]
    max_depth: int | None = None

    def __post_init__(self) -> None:
        if not self.attributes:
            raise ConfigurationError("slice enumeration requires at least one attribute")
        if len(set(self.attributes)) != len(self.attributes):
            raise ConfigurationError("attribute names must be distinct")
        for name in self.attributes:
            if not self.categories.get(name):
                raise ConfigurationError(f"attribute {name!r} has an empty category list")
        object.__setattr__(
            self, "categories", {a: tuple(self.categories[a]) for a in self.attributes}
        )

    @property
    def subset_count(self) -> int:
        return 2 ** len(self.attributes) - 1

    @property
    def ordering_count(self) -> int:
        return math.factorial(len(self.attributes))

    @property
    def depth(self) -> int:
        k = len(self.attributes)
        return k if self.max_depth is None else min(self.max_depth, k)

    def slice_count(self) -> int:
        total = 0
        for size in range(1, self.depth + 1):
            for subset in itertools.combinations(self.attributes, size):
                total += math.prod(len(self.categories[a]) for a in subset)
        return total

    def slices(self) -> Iterator[SliceFilter]:
        """All value combinations of every attribute subset up to the depth."""
        for size in range(1, self.depth + 1):
            for subset in itertools.combinations(self.attributes, size):
                pools = [self.categories[a] for a in subset]
                for values in itertools.product(*pools):
                    yield SliceFilter(tuple(zip(subset, values)))


def enumerate_slices(
    attributes: tuple[str, ...] | list[str],
    categories: Mapping[str, tuple[str, ...] | list[str]] | None = None,
    max_depth: int | None = None,
) -> SliceEnumeration:
    """Build the enumeration; with no category lists, a one-category placeholder
    per attribute still yields the subset and ordering counts."""
    attrs = tuple(attributes)
    if categories is None:
        categories = {a: ("*",) for a in attrs}
    return SliceEnumeration(
        attributes=attrs,
        categories={a: tuple(v) for a, v in categories.items()},
        max_depth=max_depth,
    )


def dataset_slices(
    dataset: LabeledDataset, attributes: tuple[str, ...] | None = None, max_depth: int | None = None
) -> SliceEnumeration:
    """Enumeration over the observed categories of the dataset's attributes."""
    attrs = tuple(attributes) if attributes is not None else dataset.protected_attributes
    return enumerate_slices(
        attrs, {a: dataset.observed_categories(a) for a in attrs}, max_depth=max_depth
    )
