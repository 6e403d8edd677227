"""
One trade, three ways
=====================

A seller offers certified data, a buyer escrows the price, the seller
reveals a key.  We run an honest trade, then a seller who corrupts one
chunk, and look at what the arbiter saw in each case.
"""

from dataclasses import replace

from blockmark import Scenario, Strategy, Variant, run

# 8 chunks of 256 bits, Merkle-proof disputes
base = Scenario(Variant.OLOGN, size_bits=2048, chunk_bits=256, seed=1)

honest = run(base)
print("honest:", honest.phase.value, honest.balance_deltas)
print("  on-chain bytes by action:", honest.cost.bytes_by_action)

# the seller flips a byte of chunk 3 before encrypting it
cheat = run(replace(base, seller=Strategy.seller("corrupt_chunk", 3)))
print("corrupt chunk 3:", cheat.phase.value, "blamed:", cheat.verdict.dishonest.value)
print("  oracle agrees:", cheat.oracle_agrees, " deltas:", cheat.balance_deltas)
print("  dispute upload:", cheat.cost.dispute_bytes, "bytes, ops:", cheat.cost.dispute_ops)
print("  ciphertext chunks visible on-chain:", cheat.privacy.ciphertext_chunks_onchain)

# the transcript is one JSON record per on-chain action
for line in cheat.transcript[:3]:
    print("  ", line[:100], "...")
