"""
Who gets blamed?
================

Play every seller behavior against every buyer behavior and compare the
contract's verdict with a referee that sees everything.  Then show the one
case where the constant-size variant is fooled: a buyer replaying a signed
chunk from an earlier sale.
"""

import random
from collections import Counter

from blockmark import Variant
from blockmark.chunks import certify, make_payload, split
from blockmark.contract import DisputeSubmission, register_certificate
from blockmark.crypto import DEFAULT_SCHEME as S
from blockmark.sim import strategy_matrix

for v in Variant:
    rows = strategy_matrix(v, chunk_count=4)
    outcome = Counter((r.phase, r.verdict) for r in rows)
    print(v.value, f"{sum(r.agrees for r in rows)}/{len(rows)} agree with the referee", dict(outcome))

# --- the replay gap -------------------------------------------------------
rng = random.Random(0)
data = rng.randbytes(128)
carol, alice = S.generate_keypair(rng), S.generate_keypair(rng)
old_key, new_key = S.generate_key(rng), S.generate_key(rng)
cert = certify(data, 256, Variant.O1, carol, S)
stale = make_payload(Variant.O1, split(data, 256), old_key, S, alice).elements[0]

c = register_certificate(Variant.O1, cert, S, balances={"alice": 5000, "bob": 5000})
c.buyer_intent_and_fund("bob", cert.root, 1000, 500, 1)
c.seller_fund("alice", 500, 2, seller_public=alice.public)
c.buyer_ack("bob", True, 4)
c.reveal_key("alice", new_key, 5)
sub = DisputeSubmission(Variant.O1, stale.ciphertext, stale.chunk_hash, signature=stale.signature, index=0)
print("stale signed chunk from an old sale ->", c.dispute("bob", sub, 6).dishonest.value, "blamed")
