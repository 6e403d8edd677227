"""
How big is a dispute?
=====================

Sweep the data size and compare what a dispute uploads in each variant:
the whole ciphertext, a Merkle path, or one signed chunk.
"""

from blockmark.chunks import Variant, byte_aligned_chunk_bits, optimal_chunk_bits
from blockmark.sim import measure

sizes = [2**k for k in range(10, 21, 2)]
print(f"{'N bits':>10} {'O(N)':>10} {'O(log N)':>10} {'O(1)':>6}")
for n in sizes:
    on = measure(Variant.ON, n, 256).formula_bits
    logn = measure(Variant.OLOGN, n, 256).formula_bits
    o1 = measure(Variant.O1, n, 256).formula_bits
    print(f"{n:>10} {on:>10} {logn:>10} {o1:>6}")

# the Merkle variant's upload (log2(N/L)+1)h + L is smallest near h/ln 2
L = optimal_chunk_bits(256)
print(f"best chunk size: {L:.2f} bits, byte aligned: {byte_aligned_chunk_bits(256)}")
# tree depth moves in whole levels, so the integer cost is a staircase and a
# chunk size that fills the last level exactly can beat the smooth optimum
for L in (128, 256, 368, 512, 1024):
    r = measure(Variant.OLOGN, 2**20, L)
    print(f"  L={L:5}  dispute payload {r.formula_bits} bits, serialized {r.dispute_onchain_bits} bits")
