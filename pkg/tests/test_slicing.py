import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairlens import SliceFilter, dataset_slices, enumerate_slices
from fairlens.errors import ConfigurationError

from conftest import make_dataset

SEVEN = (
    "race_and_color",
    "religion",
    "sex",
    "national_origin",
    "age",
    "disability",
    "genetic_information",
)


def test_seven_attribute_ordering_count():
    e = enumerate_slices(SEVEN)
    assert e.ordering_count == 5040
    assert e.subset_count == 127


def test_small_ordering_counts():
    assert enumerate_slices(["a"]).ordering_count == 1
    assert enumerate_slices(["a", "b", "c"]).ordering_count == 6


def test_slice_count_binary_attributes():
    cats = {"a": ("0", "1"), "b": ("0", "1")}
    e = enumerate_slices(["a", "b"], cats)
    # Depth 1: 2 + 2; depth 2 adds the 4-cell cross product.
    assert e.slice_count() == 8
    shallow = enumerate_slices(["a", "b"], cats, max_depth=1)
    assert shallow.slice_count() == 4


def test_slices_enumeration_order_and_content():
    e = enumerate_slices(["a", "b"], {"a": ("x", "y"), "b": ("0",)})
    got = list(e.slices())
    assert got == [
        SliceFilter.of(a="x"),
        SliceFilter.of(a="y"),
        SliceFilter.of(b="0"),
        SliceFilter.of(a="x", b="0"),
        SliceFilter.of(a="y", b="0"),
    ]
    assert len(got) == e.slice_count()


def test_depth_clamped_to_attribute_count():
    e = enumerate_slices(["a"], {"a": ("x",)}, max_depth=5)
    assert e.depth == 1


def test_empty_attribute_list_rejected():
    with pytest.raises(ConfigurationError):
        enumerate_slices([])
    with pytest.raises(ConfigurationError):
        enumerate_slices(["a", "a"])
    with pytest.raises(ConfigurationError):
        enumerate_slices(["a"], {"a": ()})


def test_dataset_slices_uses_observed_categories():
    ds = make_dataset(
        [
            (1, 1, {"g": "a", "h": "x"}),
            (0, 0, {"g": "b", "h": "x"}),
        ],
        protected=("g", "h"),
    )
    e = dataset_slices(ds)
    assert e.categories == {"g": ("a", "b"), "h": ("x",)}
    assert e.slice_count() == 2 + 1 + 2


@given(st.integers(min_value=1, max_value=8))
@settings(max_examples=8, deadline=None)
def test_combinatorics_property(k):
    attrs = [f"a{i}" for i in range(k)]
    e = enumerate_slices(attrs)
    assert e.ordering_count == math.factorial(k)
    assert e.subset_count == 2**k - 1
    # With one placeholder category each, slices == non-empty subsets.
    assert e.slice_count() == 2**k - 1
    assert sum(1 for _ in e.slices()) == e.slice_count()


@given(
    st.integers(min_value=1, max_value=4),
    st.lists(st.integers(min_value=1, max_value=3), min_size=1, max_size=4),
)
@settings(max_examples=40, deadline=None)
def test_slice_count_matches_enumeration_property(depth, sizes):
    attrs = [f"a{i}" for i in range(len(sizes))]
    cats = {a: tuple(f"v{j}" for j in range(n)) for a, n in zip(attrs, sizes)}
    e = enumerate_slices(attrs, cats, max_depth=depth)
    listed = list(e.slices())
    assert len(listed) == e.slice_count()
    assert len(set(listed)) == len(listed)  # no duplicates
    assert all(len(f.clauses) <= e.depth for f in listed)
