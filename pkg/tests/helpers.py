"""Shared test helpers."""

import hashlib
from dataclasses import replace

from blockmark.merkle import SIBLING_RIGHT, MerkleProof


def _flip_bit(b: bytes, i: int) -> bytes:
    return bytes(x ^ (1 << (i % 8)) if n == i // 8 else x for n, x in enumerate(b))


def mutations(leaf: bytes, proof: MerkleProof):
    """Every single-field tamper of (leaf, proof)."""
    for i in range(8 * len(leaf)):
        yield _flip_bit(leaf, i), proof
    yield leaf + b"\x00", proof
    yield leaf[:-1], proof
    span = 1 << max(len(proof.siblings), 1)
    for j in [*range(span + 1), 2**31, 2**32 - 1]:
        if j != proof.leaf_index:
            yield leaf, replace(proof, leaf_index=j)
    sib = list(proof.siblings)
    for k, (d, side) in enumerate(sib):
        for i in range(8 * len(d)):
            yield leaf, replace(proof, siblings=tuple(sib[:k] + [(_flip_bit(d, i), side)] + sib[k + 1 :]))
        yield leaf, replace(proof, siblings=tuple(sib[:k] + [(d, 1 - side)] + sib[k + 1 :]))
        yield leaf, replace(proof, siblings=tuple(sib[:k] + sib[k + 1 :]))
    yield leaf, replace(proof, siblings=tuple(sib + [(hashlib.sha256(b"extra").digest(), SIBLING_RIGHT)]))
