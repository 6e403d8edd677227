"""Binary Merkle trees with domain-separated leaf/node hashing.

Odd levels duplicate their last node, so a tree over ``M`` leaves has
``ceil(log2(M))`` levels above the leaves and a proof carries exactly that
many siblings.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

Hasher = Callable[[bytes], bytes]

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"
SIBLING_LEFT = 0
SIBLING_RIGHT = 1


def _sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def leaf_hash(leaf: bytes, hasher: Hasher = _sha256) -> bytes:
    return hasher(LEAF_PREFIX + leaf)


def node_hash(left: bytes, right: bytes, hasher: Hasher = _sha256) -> bytes:
    return hasher(NODE_PREFIX + left + right)


def depth_for(leaf_count: int) -> int:
    """Number of sibling levels for ``leaf_count`` leaves, i.e. ceil(log2(M))."""
    if leaf_count < 1:
        raise ValueError("leaf_count must be >= 1")
    return (leaf_count - 1).bit_length()


@dataclass(frozen=True)
class MerkleProof:
    leaf_index: int
    siblings: tuple[tuple[bytes, int], ...]

    def to_bytes(self) -> bytes:
        if len(self.siblings) > 255:
            raise ValueError("proof too deep to serialize")
        out = [self.leaf_index.to_bytes(4, "big"), bytes([len(self.siblings)])]
        for digest, side in self.siblings:
            out.append(bytes([side]))
            out.append(digest)
        return b"".join(out)

    @classmethod
    def from_bytes(cls, data: bytes, digest_bytes: int) -> "MerkleProof":
        proof, rest = cls.parse_prefix(data, digest_bytes)
        if rest:
            raise ValueError("trailing bytes after Merkle proof")
        return proof

    @classmethod
    def parse_prefix(cls, data: bytes, digest_bytes: int) -> tuple["MerkleProof", bytes]:
        """Parse a proof from the front of ``data``; return it and the remainder."""
        if len(data) < 5:
            raise ValueError("Merkle proof truncated")
        index = int.from_bytes(data[:4], "big")
        count = data[4]
        end = 5 + count * (1 + digest_bytes)
        if len(data) < end:
            raise ValueError("Merkle proof truncated")
        siblings = []
        pos = 5
        for _ in range(count):
            side = data[pos]
            siblings.append((bytes(data[pos + 1 : pos + 1 + digest_bytes]), side))
            pos += 1 + digest_bytes
        return cls(index, tuple(siblings)), bytes(data[end:])

    def byte_len(self, digest_bytes: int) -> int:
        return 5 + len(self.siblings) * (1 + digest_bytes)


class MerkleTree:
    """Merkle tree over an ordered list of byte-string leaves."""

    def __init__(self, leaves: Sequence[bytes], hasher: Hasher = _sha256):
        if not leaves:
            raise ValueError("cannot build a Merkle tree with no leaves")
        self.leaves = list(leaves)
        self.hasher = hasher
        level = [leaf_hash(x, hasher) for x in self.leaves]
        self.levels = [level]
        while len(level) > 1:
            if len(level) % 2:
                level = level + [level[-1]]
            level = [node_hash(level[i], level[i + 1], hasher) for i in range(0, len(level), 2)]
            self.levels.append(level)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves)

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def prove(self, index: int) -> MerkleProof:
        if not 0 <= index < self.leaf_count:
            raise IndexError(f"leaf index {index} out of range [0, {self.leaf_count})")
        siblings = []
        i = index
        for level in self.levels[:-1]:
            j = i ^ 1
            digest = level[j] if j < len(level) else level[i]
            siblings.append((digest, SIBLING_LEFT if i & 1 else SIBLING_RIGHT))
            i >>= 1
        return MerkleProof(index, tuple(siblings))


def build(leaves: Sequence[bytes], hasher: Hasher = _sha256) -> MerkleTree:
    return MerkleTree(leaves, hasher)


def root(tree: MerkleTree) -> bytes:
    return tree.root


def prove(tree: MerkleTree, index: int) -> MerkleProof:
    return tree.prove(index)


def merkle_root(leaves: Sequence[bytes], hasher: Hasher = _sha256) -> bytes:
    return MerkleTree(leaves, hasher).root


def verify(
    root: bytes, leaf: bytes, proof: MerkleProof, hasher: Hasher = _sha256, leaf_count: Optional[int] = None
) -> bool:
    """Fold ``leaf`` up through ``proof`` and compare with ``root``.

    Side flags must agree with the bits of ``proof.leaf_index``, so the index
    a proof claims is authenticated along with the leaf.  Pass ``leaf_count``
    whenever it is known: with last-node duplication the final leaf of an odd
    level also verifies at the phantom index just past the end.
    """
    index = proof.leaf_index
    if index < 0 or index >> len(proof.siblings):
        return False
    if leaf_count is not None and (index >= leaf_count or len(proof.siblings) != depth_for(leaf_count)):
        return False
    node = leaf_hash(leaf, hasher)
    for level, (sibling, side) in enumerate(proof.siblings):
        expected = SIBLING_LEFT if (index >> level) & 1 else SIBLING_RIGHT
        if side != expected:
            return False
        if side == SIBLING_LEFT:
            node = node_hash(sibling, node, hasher)
        else:
            node = node_hash(node, sibling, hasher)
    return node == root
