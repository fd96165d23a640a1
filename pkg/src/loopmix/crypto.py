"""Group operations and symmetric primitives for the packet format.

The mix group is Curve25519 with clamped scalars (X25519). Clamping keeps every
honest element inside the prime-order subgroup generated by the base point, and
scalar multiplication commutes, so blinding chains computed hop by hop on the
sender side agree with the single exchange a node performs. Elements are opaque
32-byte strings that round-trip bit-exactly.
"""

from __future__ import annotations

import hashlib
import hmac as _hmac
from dataclasses import dataclass

from cryptography.hazmat.primitives.asymmetric.x25519 import (
    X25519PrivateKey,
    X25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

GROUP_ELEMENT_LEN = 32
SECRET_KEY_LEN = 32
MAC_LEN = 16
TAG_LEN = 16
AEAD_OVERHEAD = 16


class GroupError(Exception):
    """A group operation failed (bad length or degenerate element)."""


@dataclass(frozen=True)
class GroupElement:
    """Opaque encoding of a Curve25519 point."""

    data: bytes

    def __post_init__(self):
        if not isinstance(self.data, bytes) or len(self.data) != GROUP_ELEMENT_LEN:
            raise GroupError("group element must be exactly 32 bytes")

    def hex(self) -> str:
        return self.data.hex()

    @classmethod
    def from_hex(cls, s: str) -> "GroupElement":
        return cls(bytes.fromhex(s))


def generate_keypair(rng=None) -> tuple[bytes, GroupElement]:
    """Return (secret, public). With an rng the secret is rng.randbytes(32)."""
    if rng is None:
        sk = X25519PrivateKey.generate()
        raw = sk.private_bytes_raw()
    else:
        raw = rng.randbytes(SECRET_KEY_LEN)
        sk = X25519PrivateKey.from_private_bytes(raw)
    pub = sk.public_key().public_bytes_raw()
    return raw, GroupElement(pub)


def public_key(secret: bytes) -> GroupElement:
    return GroupElement(
        X25519PrivateKey.from_private_bytes(secret).public_key().public_bytes_raw()
    )


def exchange(secret: bytes, element: GroupElement) -> bytes:
    """Scalar-multiply `element` by the clamped scalar `secret`.

    Raises GroupError on the all-zero result produced by low-order inputs;
    callers treat that the same as an integrity failure.
    """
    if len(secret) != SECRET_KEY_LEN:
        raise GroupError("secret scalar must be 32 bytes")
    sk = X25519PrivateKey.from_private_bytes(secret)
    try:
        return sk.exchange(X25519PublicKey.from_public_bytes(element.data))
    except ValueError as exc:
        raise GroupError("degenerate shared secret") from exc


def _h(label: bytes, *parts: bytes) -> bytes:
    d = hashlib.sha256()
    d.update(label)
    for p in parts:
        d.update(p)
    return d.digest()


def blinding_scalar(alpha: GroupElement, shared: bytes) -> bytes:
    """Per-hop blinding factor b = h(alpha, shared), used as an X25519 scalar."""
    return _h(b"loopmix-blind", alpha.data, shared)


def mac_key(shared: bytes) -> bytes:
    return _h(b"loopmix-mac", shared)


def replay_tag(shared: bytes) -> bytes:
    return _h(b"loopmix-tag", shared)[:TAG_LEN]


def header_mac(key: bytes, beta: bytes) -> bytes:
    return _hmac.new(key, beta, hashlib.sha256).digest()[:MAC_LEN]


def macs_equal(a: bytes, b: bytes) -> bool:
    return _hmac.compare_digest(a, b)


def _chacha_stream(key: bytes, nonce: bytes, n: int) -> bytes:
    enc = Cipher(algorithms.ChaCha20(key, nonce), mode=None).encryptor()
    return enc.update(b"\x00" * n)


def beta_stream(shared: bytes, n: int) -> bytes:
    return _chacha_stream(
        _h(b"loopmix-beta", shared), _h(b"loopmix-beta-nonce", shared)[:16], n
    )


def payload_stream(shared: bytes, n: int) -> bytes:
    return _chacha_stream(
        _h(b"loopmix-rho", shared), _h(b"loopmix-rho-nonce", shared)[:16], n
    )


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor operands must have equal length")
    n = len(a)
    return (
        int.from_bytes(a, "little") ^ int.from_bytes(b, "little")
    ).to_bytes(n, "little")


def deliver_seal(shared: bytes, plaintext: bytes) -> bytes:
    """Innermost payload layer: AEAD under the final hop's shared secret."""
    key = _h(b"loopmix-deliver", shared)
    return ChaCha20Poly1305(key).encrypt(b"\x00" * 12, plaintext, None)


def deliver_open(shared: bytes, blob: bytes) -> bytes:
    key = _h(b"loopmix-deliver", shared)
    try:
        return ChaCha20Poly1305(key).decrypt(b"\x00" * 12, blob, None)
    except Exception as exc:
        raise GroupError("delivery authentication failed") from exc


def e2e_seal(recipient_pub: GroupElement, plaintext: bytes, rng) -> bytes:
    """Authenticated public-key encryption: [eph pub 32][AEAD ct+tag]."""
    eph_secret = rng.randbytes(SECRET_KEY_LEN)
    eph_pub = public_key(eph_secret)
    shared = exchange(eph_secret, recipient_pub)
    key = _h(b"loopmix-e2e", shared, eph_pub.data, recipient_pub.data)
    ct = ChaCha20Poly1305(key).encrypt(b"\x00" * 12, plaintext, None)
    return eph_pub.data + ct


def e2e_open(recipient_secret: bytes, blob: bytes) -> bytes:
    """Inverse of e2e_seal. Raises GroupError when authentication fails."""
    if len(blob) < GROUP_ELEMENT_LEN + AEAD_OVERHEAD:
        raise GroupError("blob too short")
    eph_pub = GroupElement(blob[:GROUP_ELEMENT_LEN])
    shared = exchange(recipient_secret, eph_pub)
    key = _h(
        b"loopmix-e2e", shared, eph_pub.data, public_key(recipient_secret).data
    )
    try:
        return ChaCha20Poly1305(key).decrypt(
            b"\x00" * 12, blob[GROUP_ELEMENT_LEN:], None
        )
    except Exception as exc:
        raise GroupError("end-to-end authentication failed") from exc
