"""Chunking, off-chain payloads, certificates and the closed-form cost laws."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

from .crypto import DEFAULT_SCHEME, KeyPair, Scheme, SymmetricKey
from .merkle import depth_for, merkle_root

__all__ = [
    "Variant",
    "ChunkedData",
    "PayloadElement",
    "OffchainPayload",
    "Certificate",
    "split",
    "join",
    "make_payload",
    "element_message",
    "chunk_hash_root",
    "certify",
    "optimal_chunk_bits",
    "byte_aligned_chunk_bits",
    "chunk_cost_bits",
    "dispute_payload_bits",
    "dispute_framing_bytes",
    "payload_size_bytes",
    "PAYLOAD_FRAMING_BYTES",
]


class Variant(str, Enum):
    ON = "on"
    OLOGN = "ologn"
    O1 = "o1"

    @property
    def code(self) -> int:
        return {"on": 0, "ologn": 1, "o1": 2}[self.value]

    @classmethod
    def from_code(cls, code: int) -> "Variant":
        return list(cls)[code]


@dataclass(frozen=True)
class ChunkedData:
    chunks: tuple[bytes, ...]
    original_len: int
    chunk_bits: int

    @property
    def chunk_count(self) -> int:
        return len(self.chunks)

    def join(self) -> bytes:
        return b"".join(self.chunks)[: self.original_len]


def split(data: bytes, chunk_bits: int) -> ChunkedData:
    """Cut ``data`` into ``ceil(8|data| / chunk_bits)`` chunks; zero-pad the last one."""
    if chunk_bits <= 0 or chunk_bits % 8:
        raise ValueError(f"chunk size must be a positive multiple of 8 bits, got {chunk_bits}")
    if not data:
        raise ValueError("cannot chunk empty data")
    step = chunk_bits // 8
    chunks = [data[i : i + step] for i in range(0, len(data), step)]
    chunks[-1] = chunks[-1] + bytes(step - len(chunks[-1]))
    return ChunkedData(tuple(chunks), len(data), chunk_bits)


def join(chunked: ChunkedData) -> bytes:
    return chunked.join()


@dataclass(frozen=True)
class PayloadElement:
    chunk_hash: bytes
    ciphertext: bytes
    signature: bytes = b""

    @property
    def leaf(self) -> bytes:
        """Merkle leaf for the O(log N) commitment: hash || ciphertext."""
        return self.chunk_hash + self.ciphertext


# variant byte, element count, shared ciphertext length
PAYLOAD_FRAMING_BYTES = 1 + 4 + 4


@dataclass(frozen=True)
class OffchainPayload:
    variant: Variant
    elements: tuple[PayloadElement, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def to_bytes(self, scheme: Scheme = DEFAULT_SCHEME) -> bytes:
        ct_len = len(self.elements[0].ciphertext)
        if any(len(e.ciphertext) != ct_len for e in self.elements):
            raise ValueError("payload ciphertexts must share one length")
        out = [bytes([self.variant.code]), len(self.elements).to_bytes(4, "big"), ct_len.to_bytes(4, "big")]
        for e in self.elements:
            if self.variant is not Variant.ON:
                out.append(_fixed(e.chunk_hash, scheme.digest_bytes, "chunk hash"))
            out.append(e.ciphertext)
            if self.variant is Variant.O1:
                out.append(_fixed(e.signature, scheme.sig_bytes, "signature"))
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes, scheme: Scheme = DEFAULT_SCHEME) -> "OffchainPayload":
        if len(data) < PAYLOAD_FRAMING_BYTES:
            raise ValueError("payload truncated")
        variant = Variant.from_code(data[0])
        count = int.from_bytes(data[1:5], "big")
        ct_len = int.from_bytes(data[5:9], "big")
        h = 0 if variant is Variant.ON else scheme.digest_bytes
        s = scheme.sig_bytes if variant is Variant.O1 else 0
        if len(data) != PAYLOAD_FRAMING_BYTES + count * (h + ct_len + s):
            raise ValueError("payload length does not match its header")
        elements = []
        pos = PAYLOAD_FRAMING_BYTES
        for _ in range(count):
            chunk_hash = data[pos : pos + h]
            ct = data[pos + h : pos + h + ct_len]
            sig = data[pos + h + ct_len : pos + h + ct_len + s]
            elements.append(PayloadElement(bytes(chunk_hash), bytes(ct), bytes(sig)))
            pos += h + ct_len + s
        return cls(variant, tuple(elements))


def _fixed(value: bytes, n: int, what: str) -> bytes:
    if len(value) != n:
        raise ValueError(f"{what} must be {n} bytes, got {len(value)}")
    return value


def element_message(index: int, chunk_hash: bytes, ciphertext: bytes, scheme: Scheme) -> bytes:
    """Digest the seller signs for O(1) element ``index``."""
    return scheme.hash(index.to_bytes(4, "big") + chunk_hash + ciphertext)


def make_payload(
    variant: Variant,
    chunked: ChunkedData,
    key: SymmetricKey,
    scheme: Scheme = DEFAULT_SCHEME,
    signing_key: Optional[KeyPair] = None,
) -> OffchainPayload:
    variant = Variant(variant)
    if variant is Variant.ON:
        return OffchainPayload(variant, (PayloadElement(b"", scheme.encrypt(key, 0, chunked.join())),))
    if variant is Variant.O1 and signing_key is None:
        raise ValueError("the O(1) payload needs the seller's signing key")
    elements = []
    for m, chunk in enumerate(chunked.chunks):
        h = scheme.hash(chunk)
        ct = scheme.encrypt(key, m, chunk)
        sig = b""
        if variant is Variant.O1:
            sig = scheme.sign(signing_key, element_message(m, h, ct, scheme))
        elements.append(PayloadElement(h, ct, sig))
    return OffchainPayload(variant, tuple(elements))


@dataclass(frozen=True)
class Certificate:
    """Certifier-signed anchor for the data being sold.

    ``root`` is ``hash(data)`` for the O(N) variant and the Merkle root over
    the plaintext chunk hashes otherwise.
    """

    root: bytes
    carol_signature: bytes
    carol_public: bytes
    chunk_bits: int
    chunk_count: int
    original_len: int

    def verify(self, scheme: Scheme = DEFAULT_SCHEME) -> bool:
        return scheme.verify(self.carol_public, self.root, self.carol_signature)


def chunk_hash_root(chunk_hashes: Sequence[bytes], scheme: Scheme = DEFAULT_SCHEME) -> bytes:
    return merkle_root(chunk_hashes, scheme.hash)


def certify(
    data: bytes,
    chunk_bits: int,
    variant: Variant,
    carol: KeyPair,
    scheme: Scheme = DEFAULT_SCHEME,
) -> Certificate:
    variant = Variant(variant)
    if variant is Variant.ON:
        root = scheme.hash(data)
        params = (8 * len(data), 1, len(data))
    else:
        chunked = split(data, chunk_bits)
        root = chunk_hash_root([scheme.hash(c) for c in chunked.chunks], scheme)
        params = (chunk_bits, chunked.chunk_count, len(data))
    return Certificate(root, scheme.sign(carol, root), carol.public, *params)


# cost laws -------------------------------------------------------------------


def optimal_chunk_bits(hash_bits: float, alpha: float | Fraction = 1) -> float:
    """Chunk size minimising the O(log N) dispute upload: h / (alpha ln 2)."""
    if hash_bits <= 0 or alpha < 1:
        raise ValueError("need hash_bits > 0 and alpha >= 1")
    return hash_bits / (float(alpha) * math.log(2))


def chunk_cost_bits(n_bits: float, chunk_bits: float, hash_bits: float, alpha: float | Fraction = 1) -> float:
    """Continuous dispute upload (log2(N/L) + 1) h + alpha L."""
    return (math.log2(n_bits / chunk_bits) + 1) * hash_bits + float(alpha) * chunk_bits


def byte_aligned_chunk_bits(hash_bits: int, alpha: float | Fraction = 1) -> int:
    """The multiple of 8 next to the real optimum with the lower continuous cost."""
    best = optimal_chunk_bits(hash_bits, alpha)
    lo = max(8, 8 * math.floor(best / 8))
    hi = 8 * math.ceil(best / 8)
    # N cancels when comparing two chunk sizes
    return min((lo, hi), key=lambda c: chunk_cost_bits(2**20, c, hash_bits, alpha))


def _ciphertext_bits(plain_bits: int, alpha: Fraction) -> int:
    return 8 * math.ceil(Fraction(alpha) * math.ceil(plain_bits / 8))


def dispute_payload_bits(
    variant: Variant,
    n_bits: int,
    chunk_bits: int,
    hash_bits: int = 256,
    alpha: Fraction | int = 1,
    sig_bits: int = 520,
) -> int:
    """Bits of evidence a dispute uploads, excluding serialization framing.

    O(N): the whole ciphertext.  O(log N): one digest per tree level plus the
    disputed leaf (hash and ciphertext).  O(1): hash, ciphertext, signature.
    """
    variant = Variant(variant)
    if min(n_bits, chunk_bits, hash_bits) <= 0:
        raise ValueError("sizes must be positive")
    alpha = Fraction(alpha)
    if variant is Variant.ON:
        return _ciphertext_bits(n_bits, alpha)
    ct = _ciphertext_bits(chunk_bits, alpha)
    if variant is Variant.OLOGN:
        depth = depth_for(math.ceil(n_bits / chunk_bits))
        return (depth + 1) * hash_bits + ct
    return hash_bits + ct + sig_bits


def dispute_framing_bytes(variant: Variant, depth: int = 0) -> int:
    """Serialization overhead of a dispute submission on top of the formula bits.

    Every submission starts with a variant byte and carries a 4-byte
    ciphertext length.  O(log N) adds the proof header (4-byte leaf index,
    1-byte sibling count) and one side byte per sibling; O(1) adds a 4-byte
    chunk index.
    """
    variant = Variant(variant)
    if variant is Variant.ON:
        return 1 + 4
    if variant is Variant.OLOGN:
        return 1 + 4 + 1 + depth + 4
    return 1 + 4 + 4


def payload_size_bytes(variant: Variant, chunk_count: int, ciphertext_bytes: int, scheme: Scheme = DEFAULT_SCHEME) -> int:
    """Serialized :class:`OffchainPayload` size."""
    variant = Variant(variant)
    if variant is Variant.ON:
        return PAYLOAD_FRAMING_BYTES + ciphertext_bytes
    per = scheme.digest_bytes + ciphertext_bytes
    if variant is Variant.O1:
        per += scheme.sig_bytes
    return PAYLOAD_FRAMING_BYTES + chunk_count * per
