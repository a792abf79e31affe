import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fairlens import canonical_bytes, canonical_digest, canonical_dumps, sha256_hex
from fairlens.canonical import is_hex_digest, require_hex_digest
from fairlens.errors import CanonicalizationError


def test_sorted_keys_and_no_whitespace():
    doc = {"b": 1, "a": {"z": None, "y": [1, 2]}}
    assert canonical_dumps(doc) == '{"a":{"y":[1,2],"z":null},"b":1}'


def test_key_order_does_not_change_digest():
    a = {"x": 1, "y": {"k": [True, False]}}
    b = {"y": {"k": [True, False]}, "x": 1}
    assert canonical_digest(a) == canonical_digest(b)


def test_negative_zero_normalized():
    assert canonical_dumps({"v": -0.0}) == canonical_dumps({"v": 0.0})


def test_shortest_float_roundtrip():
    # 0.1 must serialize as "0.1", not a 17-digit expansion.
    assert canonical_dumps({"v": 0.1}) == '{"v":0.1}'
    assert canonical_dumps({"v": 1 / 3}) == '{"v":0.3333333333333333}'


def test_non_finite_rejected():
    # Result builders convert infinities to the "inf" sentinel before
    # serialization; a raw non-finite float reaching this layer is a bug.
    for bad in (math.inf, -math.inf, math.nan):
        with pytest.raises(CanonicalizationError):
            canonical_dumps({"v": bad})


def test_inf_sentinel_ordering():
    from fairlens.canonical import INF, sentinel_to_float

    assert sentinel_to_float(INF) == math.inf
    assert sentinel_to_float(2.5) == 2.5
    assert sentinel_to_float(INF) > 1e300


def test_non_string_keys_rejected():
    with pytest.raises(CanonicalizationError):
        canonical_dumps({1: "x"})


def test_unsupported_type_rejected():
    with pytest.raises(CanonicalizationError):
        canonical_dumps({"v": b"bytes"})


def test_digest_is_sha256_of_bytes():
    doc = {"msg": "héllo", "n": 3}
    assert canonical_digest(doc) == sha256_hex(canonical_bytes(doc))
    # UTF-8, not ASCII escapes.
    assert "héllo".encode("utf-8") in canonical_bytes(doc)


def test_hex_digest_validation():
    good = "a" * 64
    assert is_hex_digest(good)
    assert not is_hex_digest("A" * 64)  # lowercase only
    assert not is_hex_digest("a" * 63)
    require_hex_digest(good, "digest")
    with pytest.raises(CanonicalizationError):
        require_hex_digest("zz", "digest")


json_values = st.recursive(
    st.none()
    | st.booleans()
    | st.integers(min_value=-(2**53), max_value=2**53)
    | st.floats(allow_nan=False, allow_infinity=False)
    | st.text(max_size=20),
    lambda children: st.lists(children, max_size=4)
    | st.dictionaries(st.text(max_size=8), children, max_size=4),
    max_leaves=25,
)


@given(json_values)
def test_canonical_form_is_fixed_point(doc):
    """Parsing the canonical bytes and re-canonicalizing reproduces them."""
    first = canonical_bytes(doc)
    again = canonical_bytes(json.loads(first))
    assert first == again


@given(json_values)
def test_digest_deterministic(doc):
    assert canonical_digest(doc) == canonical_digest(doc)
    assert is_hex_digest(canonical_digest(doc))
