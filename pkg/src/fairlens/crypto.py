"""Snapshot encryption, certificate signing, and key-file handling.

Algorithms are fixed here and recorded as identifier strings inside every
artifact so a future rotation is detectable from the artifacts alone:
AES-256-GCM for snapshot confidentiality, Ed25519 for certificates,
SHA-256 for all digests and key fingerprints.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

from .canonical import require_hex_digest, sha256_hex
from .errors import AuthenticationFailure, KeyMaterialError, ValidationError
from .rng import generator
from .timestamps import now_utc, parse_rfc3339

AEAD_ALGORITHM = "AES-256-GCM"
SIGNATURE_ALGORITHM = "Ed25519"
KEY_LENGTH = 32
NONCE_LENGTH = 12

__all__ = [
    "AEAD_ALGORITHM",
    "BOC",
    "EncryptedSnapshotInfo",
    "KEY_LENGTH",
    "NONCE_LENGTH",
    "SIGNATURE_ALGORITHM",
    "decrypt_snapshot",
    "encrypt_snapshot",
    "generate_secret_key",
    "generate_signing_key",
    "issue_boc",
    "key_fingerprint",
    "load_signing_key",
    "load_verify_key",
    "public_key_id",
    "read_key_file",
    "verify_boc",
    "write_key_file",
]


def _require_key(key: bytes) -> bytes:
    if not isinstance(key, (bytes, bytearray)) or len(key) != KEY_LENGTH:
        raise KeyMaterialError(f"key must be exactly {KEY_LENGTH} bytes")
    return bytes(key)


def key_fingerprint(key: bytes) -> str:
    """Public identifier of a secret key: the SHA-256 of its raw bytes."""
    return sha256_hex(_require_key(key))


@dataclass(frozen=True)
class EncryptedSnapshotInfo:
    """Everything an auditor needs to locate and verify a snapshot blob.

    Carries no key material: the key itself is escrowed out of band and
    only its fingerprint travels with the report.
    """

    ciphertext_digest: str
    aead_algorithm: str
    nonce: str
    key_fingerprint: str
    plaintext_length: int

    def __post_init__(self) -> None:
        require_hex_digest(self.ciphertext_digest, "ciphertext_digest")
        require_hex_digest(self.key_fingerprint, "key_fingerprint")
        if len(self.nonce) != NONCE_LENGTH * 2 or not all(
            c in "0123456789abcdef" for c in self.nonce
        ):
            raise ValidationError(f"nonce must be {NONCE_LENGTH} bytes hex-encoded")
        if self.plaintext_length < 0:
            raise ValidationError("plaintext_length must be >= 0")

    def to_doc(self) -> dict:
        return {
            "ciphertext_digest": self.ciphertext_digest,
            "aead_algorithm": self.aead_algorithm,
            "nonce": self.nonce,
            "key_fingerprint": self.key_fingerprint,
            "plaintext_length": self.plaintext_length,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "EncryptedSnapshotInfo":
        try:
            return cls(
                ciphertext_digest=doc["ciphertext_digest"],
                aead_algorithm=doc["aead_algorithm"],
                nonce=doc["nonce"],
                key_fingerprint=doc["key_fingerprint"],
                plaintext_length=doc["plaintext_length"],
            )
        except KeyError as exc:
            raise ValidationError(f"snapshot info missing field {exc.args[0]!r}") from None


def generate_secret_key() -> bytes:
    return os.urandom(KEY_LENGTH)


def encrypt_snapshot(
    plaintext: bytes,
    key: bytes,
    *,
    seed: int | None = None,
) -> tuple[bytes, EncryptedSnapshotInfo]:
    """Authenticated encryption of a data snapshot.

    The nonce comes from the system generator, or from the seeded generator
    when a seed is given (reproducible fixtures). A (key, seed) pair must
    not be reused across distinct plaintexts.
    """
    key = _require_key(key)
    if seed is None:
        nonce = os.urandom(NONCE_LENGTH)
    else:
        nonce = generator(seed).bytes(NONCE_LENGTH)
    ciphertext = AESGCM(key).encrypt(nonce, bytes(plaintext), None)
    info = EncryptedSnapshotInfo(
        ciphertext_digest=sha256_hex(ciphertext),
        aead_algorithm=AEAD_ALGORITHM,
        nonce=nonce.hex(),
        key_fingerprint=key_fingerprint(key),
        plaintext_length=len(plaintext),
    )
    return ciphertext, info


def decrypt_snapshot(ciphertext: bytes, key: bytes, info: EncryptedSnapshotInfo) -> bytes:
    """Inverse of :func:`encrypt_snapshot`; rejects any tampering outright."""
    key = _require_key(key)
    if info.aead_algorithm != AEAD_ALGORITHM:
        raise ValidationError(f"unsupported AEAD algorithm {info.aead_algorithm!r}")
    if key_fingerprint(key) != info.key_fingerprint:
        raise AuthenticationFailure("key fingerprint does not match snapshot info")
    if sha256_hex(ciphertext) != info.ciphertext_digest:
        raise AuthenticationFailure("ciphertext digest mismatch; blob was modified")
    try:
        plaintext = AESGCM(key).decrypt(bytes.fromhex(info.nonce), bytes(ciphertext), None)
    except InvalidTag:
        raise AuthenticationFailure("snapshot failed AEAD authentication") from None
    if len(plaintext) != info.plaintext_length:
        raise AuthenticationFailure("plaintext length does not match snapshot info")
    return plaintext


def generate_signing_key() -> Ed25519PrivateKey:
    return Ed25519PrivateKey.generate()


def public_key_id(public_key: Ed25519PublicKey) -> str:
    """Stable identifier for a verification key (SHA-256 of raw key bytes)."""
    return sha256_hex(public_key.public_bytes_raw())


def _boc_signed_bytes(issuer_id: str, issued_at: str, report_digest: str) -> bytes:
    # Newline-delimited fields make the concatenation unambiguous.
    return f"{issuer_id}\n{issued_at}\n{report_digest}\n".encode("utf-8")


@dataclass(frozen=True)
class BOC:
    """Detached certificate binding an issuer to one report digest."""

    issuer_id: str
    issued_at: str
    report_digest: str
    signature: str
    signer_public_key_id: str

    def __post_init__(self) -> None:
        require_hex_digest(self.report_digest, "report_digest")
        parse_rfc3339(self.issued_at)
        if not self.issuer_id:
            raise ValidationError("issuer_id must be non-empty")

    def to_doc(self) -> dict:
        return {
            "issuer_id": self.issuer_id,
            "issued_at": self.issued_at,
            "report_digest": self.report_digest,
            "signature": self.signature,
            "signer_public_key_id": self.signer_public_key_id,
            "algorithm": SIGNATURE_ALGORITHM,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "BOC":
        try:
            return cls(
                issuer_id=doc["issuer_id"],
                issued_at=doc["issued_at"],
                report_digest=doc["report_digest"],
                signature=doc["signature"],
                signer_public_key_id=doc["signer_public_key_id"],
            )
        except KeyError as exc:
            raise ValidationError(f"certificate missing field {exc.args[0]!r}") from None


def issue_boc(
    report_digest: str,
    issuer_id: str,
    signing_key: Ed25519PrivateKey,
    *,
    issued_at: str | None = None,
) -> BOC:
    require_hex_digest(report_digest, "report_digest")
    issued_at = issued_at if issued_at is not None else now_utc()
    signature = signing_key.sign(_boc_signed_bytes(issuer_id, issued_at, report_digest))
    return BOC(
        issuer_id=issuer_id,
        issued_at=issued_at,
        report_digest=report_digest,
        signature=signature.hex(),
        signer_public_key_id=public_key_id(signing_key.public_key()),
    )


def verify_boc(
    boc: BOC,
    public_key: Ed25519PublicKey,
    report_digest: str | None = None,
) -> bool:
    """True only for an authentic certificate over the expected digest.

    Every mismatch is a plain False; only malformed key material raises.
    """
    if not isinstance(public_key, Ed25519PublicKey):
        raise KeyMaterialError("verification key must be an Ed25519 public key")
    if report_digest is not None and boc.report_digest != report_digest:
        return False
    try:
        raw = bytes.fromhex(boc.signature)
    except ValueError:
        return False
    try:
        public_key.verify(raw, _boc_signed_bytes(boc.issuer_id, boc.issued_at, boc.report_digest))
    except InvalidSignature:
        return False
    return True


def write_key_file(path: str | Path, key: bytes) -> None:
    """Store a 32-byte key hex-encoded, readable by the owner only."""
    path = Path(path)
    path.write_text(_require_key(key).hex() + "\n", encoding="utf-8")
    os.chmod(path, 0o600)


def read_key_file(path: str | Path) -> bytes:
    text = Path(path).read_text(encoding="utf-8").strip()
    try:
        key = bytes.fromhex(text)
    except ValueError:
        raise KeyMaterialError(f"key file {path} is not hex-encoded") from None
    return _require_key(key)


def load_signing_key(path: str | Path) -> Ed25519PrivateKey:
    return Ed25519PrivateKey.from_private_bytes(read_key_file(path))


def load_verify_key(hex_key: str) -> Ed25519PublicKey:
    """Public key from its hex encoding, as distributed in registry config."""
    try:
        raw = bytes.fromhex(hex_key.strip())
    except (ValueError, AttributeError):
        raise KeyMaterialError("public key must be 32 bytes hex-encoded") from None
    if len(raw) != KEY_LENGTH:
        raise KeyMaterialError("public key must be 32 bytes hex-encoded")
    try:
        return Ed25519PublicKey.from_public_bytes(raw)
    except Exception:
        raise KeyMaterialError("invalid public key bytes") from None
