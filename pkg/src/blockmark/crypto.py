"""Hash, symmetric cipher and signature primitives behind one scheme object.

Every size the cost meter bills (digest width, ciphertext expansion, signature
length) is read off the :class:`Scheme`, so swapping primitives never requires
touching the accounting code.

Two scheme kinds exist:

``standard``
    SHA-256 (SHAKE-256 truncated for other widths), a SHAKE-256 keystream
    cipher keyed by ``key || chunk ordinal``, and Ed25519 signatures padded
    with a one-byte tag to ``sig_bytes`` (65 by default, the size of an
    ``r || s || v`` ECDSA signature).
``toy``
    Truncated BLAKE2b hashing and a keyed-hash "signature" of arbitrary
    width.  Anyone holding the public key can forge it; it exists so tests
    can sweep hash and signature sizes freely.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

__all__ = [
    "Scheme",
    "SymmetricKey",
    "KeyPair",
    "DEFAULT_SCHEME",
    "TOY_SCHEME",
]

_ED25519_SIG = 64
_SIG_TAG = 0x1B


def _xor(a: bytes, b: bytes) -> bytes:
    n = len(a)
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(n, "big")


@dataclass(frozen=True)
class SymmetricKey:
    """Secret for the chunk cipher; ``key_id`` is a short label safe to log."""

    secret: bytes
    key_id: str = field(default="", compare=False)

    def __post_init__(self):
        if not self.secret:
            raise ValueError("symmetric key must be non-empty")
        if not self.key_id:
            label = hashlib.sha256(b"key-id" + self.secret).hexdigest()[:12]
            object.__setattr__(self, "key_id", label)


@dataclass(frozen=True)
class KeyPair:
    public: bytes
    secret: bytes = field(repr=False)


@dataclass(frozen=True)
class Scheme:
    name: str = "sha256/shake-xor/ed25519"
    kind: str = "standard"
    hash_bits: int = 256
    alpha: Fraction = Fraction(1)
    sig_bytes: int = 65
    key_bytes: int = 32

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.kind not in ("standard", "toy"):
            raise ValueError(f"unknown scheme kind {self.kind!r}")
        if self.hash_bits <= 0 or self.hash_bits % 8:
            raise ValueError("hash_bits must be a positive multiple of 8")
        if self.alpha < 1:
            raise ValueError("alpha must be >= 1")
        if self.key_bytes <= 0:
            raise ValueError("key_bytes must be positive")
        if self.kind == "standard" and self.sig_bytes < _ED25519_SIG + 1:
            raise ValueError("standard scheme needs sig_bytes >= 65")
        if self.kind == "toy" and (self.sig_bytes <= 0 or self.hash_bits > 512):
            raise ValueError("toy scheme needs sig_bytes > 0 and hash_bits <= 512")

    # sizes -------------------------------------------------------------

    @property
    def digest_bytes(self) -> int:
        return self.hash_bits // 8

    @property
    def sig_bits(self) -> int:
        return 8 * self.sig_bytes

    def ciphertext_len(self, plaintext_len: int) -> int:
        return math.ceil(self.alpha * plaintext_len)

    def plaintext_len(self, ciphertext_len: int) -> int:
        """Invert :meth:`ciphertext_len`; raises ``ValueError`` if no length maps there."""
        # ceil(alpha * n) is strictly increasing in n because alpha >= 1
        n = math.floor(Fraction(ciphertext_len) / self.alpha)
        while n > 0 and self.ciphertext_len(n) > ciphertext_len:
            n -= 1
        if n < 0 or self.ciphertext_len(n) != ciphertext_len:
            raise ValueError(
                f"ciphertext length {ciphertext_len} is not produced by alpha={self.alpha}"
            )
        return n

    def descriptor(self) -> dict:
        return {
            "name": self.name,
            "kind": self.kind,
            "hash_bits": self.hash_bits,
            "alpha": f"{self.alpha.numerator}/{self.alpha.denominator}",
            "sig_bytes": self.sig_bytes,
            "key_bytes": self.key_bytes,
        }

    @classmethod
    def from_descriptor(cls, d: dict) -> "Scheme":
        return cls(
            name=d.get("name", cls.name),
            kind=d.get("kind", "standard"),
            hash_bits=int(d.get("hash_bits", 256)),
            alpha=Fraction(str(d.get("alpha", "1"))),
            sig_bytes=int(d.get("sig_bytes", 65)),
            key_bytes=int(d.get("key_bytes", 32)),
        )

    # hash ----------------------------------------------------------------

    def hash(self, data: bytes) -> bytes:
        if self.kind == "toy":
            return hashlib.blake2b(data, digest_size=self.digest_bytes).digest()
        if self.hash_bits == 256:
            return hashlib.sha256(data).digest()
        return hashlib.shake_256(b"blockmark-h" + data).digest(self.digest_bytes)

    # cipher ----------------------------------------------------------------

    def _keystream(self, key: SymmetricKey, index: int, n: int) -> bytes:
        seed = b"blockmark-ks" + key.secret + index.to_bytes(8, "big")
        return hashlib.shake_256(seed).digest(n)

    def encrypt(self, key: SymmetricKey, index: int, plaintext: bytes) -> bytes:
        body = _xor(plaintext, self._keystream(key, index, len(plaintext)))
        extra = self.ciphertext_len(len(plaintext)) - len(plaintext)
        if extra:
            tag_seed = b"blockmark-tag" + key.secret + index.to_bytes(8, "big") + plaintext
            body += hashlib.shake_256(tag_seed).digest(extra)
        return body

    def decrypt(self, key: SymmetricKey, index: int, ciphertext: bytes) -> bytes:
        n = self.plaintext_len(len(ciphertext))
        return _xor(ciphertext[:n], self._keystream(key, index, n))

    def generate_key(self, rng: random.Random) -> SymmetricKey:
        return SymmetricKey(rng.randbytes(self.key_bytes))

    # signatures ------------------------------------------------------------

    def keypair(self, seed: bytes) -> KeyPair:
        """Deterministic key pair from a 32-byte seed."""
        seed = hashlib.sha256(b"blockmark-sk" + seed).digest()
        if self.kind == "toy":
            return KeyPair(public=hashlib.sha256(b"toy-pk" + seed).digest(), secret=seed)
        sk = Ed25519PrivateKey.from_private_bytes(seed)
        pk = sk.public_key().public_bytes(
            serialization.Encoding.Raw, serialization.PublicFormat.Raw
        )
        return KeyPair(public=pk, secret=seed)

    def generate_keypair(self, rng: random.Random) -> KeyPair:
        return self.keypair(rng.randbytes(32))

    def _toy_sig(self, public: bytes, message: bytes) -> bytes:
        return hashlib.shake_256(b"toy-sig" + public + message).digest(self.sig_bytes)

    def _sig_suffix(self) -> bytes:
        return bytes([_SIG_TAG]) + bytes(self.sig_bytes - _ED25519_SIG - 1)

    def sign(self, keys: KeyPair, message: bytes) -> bytes:
        if self.kind == "toy":
            return self._toy_sig(keys.public, message)
        sk = Ed25519PrivateKey.from_private_bytes(keys.secret)
        return sk.sign(message) + self._sig_suffix()

    def verify(self, public: bytes, message: bytes, signature: bytes) -> bool:
        if len(signature) != self.sig_bytes:
            return False
        if self.kind == "toy":
            return signature == self._toy_sig(public, message)
        if signature[_ED25519_SIG:] != self._sig_suffix():
            return False
        try:
            Ed25519PublicKey.from_public_bytes(public).verify(signature[:_ED25519_SIG], message)
        except (InvalidSignature, ValueError):
            return False
        return True


DEFAULT_SCHEME = Scheme()
TOY_SCHEME = Scheme(name="toy/blake2b/keyed-hash", kind="toy", hash_bits=64, sig_bytes=8, key_bytes=8)
