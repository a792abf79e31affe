import os
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fairlens import canonical_digest
from fairlens.crypto import (
    BOC,
    EncryptedSnapshotInfo,
    decrypt_snapshot,
    encrypt_snapshot,
    generate_secret_key,
    generate_signing_key,
    issue_boc,
    key_fingerprint,
    load_signing_key,
    load_verify_key,
    public_key_id,
    read_key_file,
    verify_boc,
    write_key_file,
)
from fairlens.errors import AuthenticationFailure, KeyMaterialError

KEY = bytes(range(32))
DIGEST = canonical_digest({"kind": "report"})
OTHER_DIGEST = canonical_digest({"kind": "other"})


def test_round_trip():
    plaintext = b"dataset snapshot bytes \x00\xff"
    ciphertext, info = encrypt_snapshot(plaintext, KEY, seed=1)
    assert decrypt_snapshot(ciphertext, KEY, info) == plaintext
    assert info.plaintext_length == len(plaintext)
    assert info.aead_algorithm == "AES-256-GCM"
    assert info.key_fingerprint == key_fingerprint(KEY)
    assert len(bytes.fromhex(info.nonce)) == 12


def test_seeded_nonce_is_deterministic():
    a = encrypt_snapshot(b"x", KEY, seed=9)
    b = encrypt_snapshot(b"x", KEY, seed=9)
    assert a == b
    c = encrypt_snapshot(b"x", KEY, seed=10)
    assert c[1].nonce != a[1].nonce


def test_unseeded_nonces_differ():
    a = encrypt_snapshot(b"x", KEY)
    b = encrypt_snapshot(b"x", KEY)
    assert a[1].nonce != b[1].nonce


def test_every_single_bit_ciphertext_mutation_rejected():
    plaintext = b"short secret"
    ciphertext, info = encrypt_snapshot(plaintext, KEY, seed=2)
    for byte_index in range(len(ciphertext)):
        for bit in range(8):
            mutated = bytearray(ciphertext)
            mutated[byte_index] ^= 1 << bit
            with pytest.raises(AuthenticationFailure):
                decrypt_snapshot(bytes(mutated), KEY, info)


def test_wrong_key_rejected():
    ciphertext, info = encrypt_snapshot(b"p", KEY, seed=3)
    with pytest.raises(AuthenticationFailure):
        decrypt_snapshot(ciphertext, bytes(32), info)


def test_bad_key_material_rejected():
    with pytest.raises(KeyMaterialError):
        encrypt_snapshot(b"p", b"short")


def test_info_round_trips_through_doc():
    _, info = encrypt_snapshot(b"p", KEY, seed=4)
    assert EncryptedSnapshotInfo.from_doc(info.to_doc()) == info


def test_generated_key_length_and_uniqueness():
    a, b = generate_secret_key(), generate_secret_key()
    assert len(a) == 32 and len(b) == 32
    assert a != b


def test_key_file_round_trip(tmp_path):
    path = tmp_path / "snapshot.key"
    write_key_file(path, KEY)
    assert read_key_file(path) == KEY
    mode = os.stat(path).st_mode & 0o777
    assert mode == 0o600


def test_boc_issue_and_verify():
    sk = generate_signing_key()
    boc = issue_boc(DIGEST, "standards-board", sk, issued_at="2026-01-01T00:00:00Z")
    assert boc.issuer_id == "standards-board"
    assert boc.report_digest == DIGEST
    assert boc.signer_public_key_id == public_key_id(sk.public_key())
    assert verify_boc(boc, sk.public_key()) is True
    assert verify_boc(boc, sk.public_key(), DIGEST) is True


def test_boc_wrong_key_fails():
    sk, other = generate_signing_key(), generate_signing_key()
    boc = issue_boc(DIGEST, "board", sk)
    assert verify_boc(boc, other.public_key()) is False


def test_boc_wrong_digest_fails():
    sk = generate_signing_key()
    boc = issue_boc(DIGEST, "board", sk)
    assert verify_boc(boc, sk.public_key(), OTHER_DIGEST) is False


def test_boc_mutated_signature_fails():
    sk = generate_signing_key()
    boc = issue_boc(DIGEST, "board", sk)
    raw = bytearray(bytes.fromhex(boc.signature))
    raw[0] ^= 0x01
    forged = BOC(
        issuer_id=boc.issuer_id,
        issued_at=boc.issued_at,
        report_digest=boc.report_digest,
        signature=raw.hex(),
        signer_public_key_id=boc.signer_public_key_id,
    )
    assert verify_boc(forged, sk.public_key()) is False


def test_boc_field_tampering_fails():
    sk = generate_signing_key()
    boc = issue_boc(DIGEST, "board", sk, issued_at="2026-01-01T00:00:00Z")
    for field, value in [
        ("issuer_id", "impostor"),
        ("issued_at", "2027-01-01T00:00:00Z"),
        ("report_digest", OTHER_DIGEST),
    ]:
        doc = boc.to_doc()
        doc[field] = value
        assert verify_boc(BOC.from_doc(doc), sk.public_key()) is False


def test_boc_doc_round_trip():
    sk = generate_signing_key()
    boc = issue_boc(DIGEST, "board", sk)
    doc = boc.to_doc()
    assert doc["algorithm"] == "Ed25519"
    assert BOC.from_doc(doc) == boc


def test_signing_key_file_round_trip(tmp_path):
    sk = generate_signing_key()
    path = tmp_path / "signer.key"
    write_key_file(path, sk.private_bytes_raw())
    loaded = load_signing_key(path)
    boc = issue_boc(DIGEST, "board", loaded)
    assert verify_boc(boc, sk.public_key()) is True


def test_load_verify_key_from_hex():
    sk = generate_signing_key()
    hex_key = sk.public_key().public_bytes_raw().hex()
    pk = load_verify_key(hex_key)
    boc = issue_boc(DIGEST, "board", sk)
    assert verify_boc(boc, pk) is True
    with pytest.raises(KeyMaterialError):
        load_verify_key("not hex")


@given(st.binary(min_size=0, max_size=300), st.integers(min_value=0, max_value=2**31))
@settings(max_examples=60, deadline=None)
def test_round_trip_property(plaintext, seed):
    ciphertext, info = encrypt_snapshot(plaintext, KEY, seed=seed)
    assert decrypt_snapshot(ciphertext, KEY, info) == plaintext
    assert ciphertext != plaintext or plaintext == b""


@given(st.integers(min_value=0, max_value=2**31))
@settings(max_examples=30, deadline=None)
def test_random_single_bit_mutations_property(seed):
    rng = random.Random(seed)
    plaintext = bytes(rng.getrandbits(8) for _ in range(rng.randint(1, 64)))
    ciphertext, info = encrypt_snapshot(plaintext, KEY, seed=seed)
    position = rng.randrange(len(ciphertext) * 8)
    mutated = bytearray(ciphertext)
    mutated[position // 8] ^= 1 << (position % 8)
    with pytest.raises(AuthenticationFailure):
        decrypt_snapshot(bytes(mutated), KEY, info)
