import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from blockmark.chunks import (
    PAYLOAD_FRAMING_BYTES,
    OffchainPayload,
    Variant,
    byte_aligned_chunk_bits,
    certify,
    chunk_cost_bits,
    dispute_framing_bytes,
    dispute_payload_bits,
    element_message,
    join,
    make_payload,
    optimal_chunk_bits,
    payload_size_bytes,
    split,
)
from blockmark.contract import DisputeSubmission
from blockmark.crypto import DEFAULT_SCHEME, TOY_SCHEME, Scheme
from blockmark.merkle import MerkleTree, depth_for

S = DEFAULT_SCHEME


def test_split_whole():
    d = bytes(range(40))
    c = split(d, 8 * len(d))
    assert c.chunk_count == 1 and c.chunks[0] == d


def test_split_pads_last_chunk():
    d = random.Random(0).randbytes(1000)
    c = split(d, 256)
    assert c.chunk_count == 32
    assert all(len(x) == 32 for x in c.chunks)
    assert c.chunks[-1][8:] == bytes(24)
    assert join(c) == d


@pytest.mark.parametrize("bits", [0, 7, 12, -8])
def test_split_rejects_unaligned(bits):
    with pytest.raises(ValueError):
        split(b"abc", bits)


def test_split_rejects_empty():
    with pytest.raises(ValueError):
        split(b"", 64)


def test_round_trip_random_pairs():
    rng = random.Random(1)
    for _ in range(1000):
        d = rng.randbytes(rng.randrange(1, 300))
        L = 8 * rng.randrange(1, 80)
        c = split(d, L)
        assert c.chunk_count == math.ceil(8 * len(d) / L)
        assert c.join() == d


@given(st.binary(min_size=1, max_size=500), st.integers(1, 64))
def test_round_trip_property(d, w):
    assert split(d, 8 * w).join() == d


def _payload(variant, m=5, L=256, scheme=S):
    rng = random.Random(m)
    d = rng.randbytes(m * L // 8 - 3)
    kp = scheme.keypair(b"alice")
    return make_payload(variant, split(d, L), scheme.generate_key(rng), scheme, kp), d


@pytest.mark.parametrize("variant", list(Variant))
def test_payload_round_trip(variant):
    p, _ = _payload(variant)
    assert OffchainPayload.from_bytes(p.to_bytes(S), S) == p


@pytest.mark.parametrize("m", [1, 2, 7, 16])
@pytest.mark.parametrize("alpha", [Fraction(1), Fraction(3, 2)])
def test_payload_size_law(m, alpha):
    s = Scheme(alpha=alpha)
    L = 256
    ct_bits = 8 * math.ceil(alpha * L / 8)
    p, _ = _payload(Variant.OLOGN, m, L, s)
    assert len(p.to_bytes(s)) == PAYLOAD_FRAMING_BYTES + m * (s.hash_bits + ct_bits) // 8
    p, _ = _payload(Variant.O1, m, L, s)
    assert len(p.to_bytes(s)) == PAYLOAD_FRAMING_BYTES + m * (s.hash_bits + ct_bits + s.sig_bits) // 8
    assert len(p.to_bytes(s)) == payload_size_bytes(Variant.O1, m, ct_bits // 8, s)


def test_o1_payload_needs_signing_key():
    with pytest.raises(ValueError):
        make_payload(Variant.O1, split(b"x" * 64, 256), S.generate_key(random.Random(0)), S)


def test_o1_elements_are_signed_with_index():
    kp = S.keypair(b"alice")
    p, _ = _payload(Variant.O1)
    for m, e in enumerate(p.elements):
        assert S.verify(kp.public, element_message(m, e.chunk_hash, e.ciphertext, S), e.signature)
        assert not S.verify(kp.public, element_message(m + 1, e.chunk_hash, e.ciphertext, S), e.signature)


@pytest.mark.parametrize("variant", list(Variant))
def test_certificate_verifies(variant):
    d = random.Random(2).randbytes(100)
    cert = certify(d, 256, variant, S.keypair(b"carol"), S)
    assert cert.verify(S)
    assert cert.original_len == 100
    if variant is Variant.ON:
        assert cert.root == S.hash(d)
    else:
        assert cert.chunk_count == 4


def test_optimal_chunk_bits():
    assert optimal_chunk_bits(256, 1) == pytest.approx(369.33, abs=0.01)
    assert round(optimal_chunk_bits(256, 1)) == 369
    assert optimal_chunk_bits(256, 2) == pytest.approx(optimal_chunk_bits(256, 1) / 2)
    with pytest.raises(ValueError):
        optimal_chunk_bits(256, Fraction(1, 2))


@pytest.mark.parametrize("n", [2**12, 2**20, 2**30])
def test_optimum_is_scan_minimum(n):
    costs = {L: chunk_cost_bits(n, L, 256, 1) for L in range(1, 5000)}
    best = min(costs, key=costs.get)
    assert abs(best - optimal_chunk_bits(256, 1)) <= 1


def test_optimum_is_stationary_point():
    f = lambda L: chunk_cost_bits(2**20, L, 256, 1)
    L = optimal_chunk_bits(256, 1)
    assert (f(L + 1e-4) - f(L - 1e-4)) / 2e-4 == pytest.approx(0, abs=1e-6)


def test_byte_aligned_choice():
    assert byte_aligned_chunk_bits(256, 1) in (368, 376)
    assert byte_aligned_chunk_bits(256, 1) % 8 == 0


def test_constant_dispute_size():
    for k in range(10, 25):
        assert dispute_payload_bits(Variant.O1, 2**k, 256, 256, 1, 520) == 1032


def test_single_leaf_dispute_size():
    assert dispute_payload_bits(Variant.OLOGN, 256, 256) == 256 + 256
    assert dispute_payload_bits(Variant.OLOGN, 200, 256) == 256 + 256


@pytest.mark.parametrize("L", [256, 368, 376, 1024])
def test_doubling_adds_one_digest(L):
    # once there are two or more chunks every doubling adds exactly one level
    vals = [dispute_payload_bits(Variant.OLOGN, 2**k, L) for k in range(11, 25)]
    assert all(b - a == 256 for a, b in zip(vals, vals[1:]))


def test_full_dispute_is_alpha_n():
    assert dispute_payload_bits(Variant.ON, 8000, 256) == 8000
    assert dispute_payload_bits(Variant.ON, 8000, 256, alpha=Fraction(3, 2)) == 12000


@pytest.mark.parametrize("L", [368, 376])
def test_serialized_dispute_matches_formula(L):
    n = 2**20
    rng = random.Random(L)
    d = rng.randbytes(n // 8)
    key = S.generate_key(rng)
    payload = make_payload(Variant.OLOGN, split(d, L), key, S)
    tree = MerkleTree([e.leaf for e in payload.elements], S.hash)
    idx = len(payload) // 3
    e = payload.elements[idx]
    sub = DisputeSubmission(Variant.OLOGN, e.ciphertext, e.chunk_hash, proof=tree.prove(idx))
    raw = sub.to_bytes(S)
    depth = depth_for(len(payload))
    assert 8 * len(raw) == dispute_payload_bits(Variant.OLOGN, n, L) + 8 * dispute_framing_bytes(Variant.OLOGN, depth)
    assert DisputeSubmission.from_bytes(raw, S) == sub


def test_serialized_o1_dispute_is_1032_plus_framing():
    p, _ = _payload(Variant.O1)
    e = p.elements[2]
    raw = DisputeSubmission(Variant.O1, e.ciphertext, e.chunk_hash, signature=e.signature, index=2).to_bytes(S)
    assert 8 * len(raw) == 1032 + 8 * dispute_framing_bytes(Variant.O1)


def test_toy_scheme_sizes_follow_descriptor():
    s = TOY_SCHEME
    p, _ = _payload(Variant.O1, 3, 64, s)
    assert len(p.to_bytes(s)) == PAYLOAD_FRAMING_BYTES + 3 * (8 + 8 + 8)
    assert dispute_payload_bits(Variant.O1, 192, 64, s.hash_bits, s.alpha, s.sig_bits) == 64 + 64 + 64
