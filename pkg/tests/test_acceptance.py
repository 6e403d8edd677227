"""Acceptance checks; the terminal summary prints one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -s`` to also see the
per-check detail lines.
"""

import csv
import json
import math
import os
import random
import subprocess
import sys
import time
from dataclasses import replace

import pytest

from helpers import mutations

from blockmark.chunks import Variant, dispute_payload_bits
from blockmark.cli import chunk_opt_report, main
from blockmark.contract import Phase
from blockmark.merkle import build, depth_for, verify
from blockmark.sim import (
    SCHEDULE,
    Scenario,
    Strategy,
    buyer_strategies,
    fuzz_fixture,
    fuzz_run,
    run,
    seller_strategies,
    strategy_matrix,
)

VARIANTS = list(Variant)
PRICE, DEP_A, DEP_B = 1000, 500, 500


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


def read_rows(path):
    lines = path.read_text().splitlines()
    return list(csv.DictReader(lines[1:]))


@pytest.mark.criterion(1, "optimal chunk size 369.33 bits, scan minimum within 8 bits, < 1 s")
def test_optimal_chunk_size(capsys):
    t0 = time.perf_counter()
    assert main(["chunk-opt", "--hash-bits", "256", "--alpha", "1", "--size", str(2**20)]) == 0
    elapsed = time.perf_counter() - t0
    r = json.loads(capsys.readouterr().out)
    expected = 256 / math.log(2)
    assert r["optimal_chunk_bits"] == pytest.approx(expected, rel=1e-12)
    assert round(r["optimal_chunk_bits"], 2) == 369.33
    assert abs(r["scan_argmin_bits"] - r["optimal_chunk_bits"]) <= 8
    assert r == chunk_opt_report(256, 1, 2**20)
    assert elapsed < 1.0
    with capsys.disabled():
        report(1, True, f"L*={r['optimal_chunk_bits']:.2f} scan={r['scan_argmin_bits']} in {elapsed:.3f}s")


@pytest.mark.criterion(2, "O(1) dispute is 1032 bits for N = 2^10..2^24 and serialized size = formula + framing, < 10 s")
def test_constant_dispute(tmp_path, capsys):
    out = tmp_path / "o1.csv"
    t0 = time.perf_counter()
    assert main(["bench", "--variant", "o1", "--size", "2^10..2^24", "--chunk-bits", "256",
                 "--hash-bits", "256", "--alpha", "1", "--sig-bytes", "65", "--out", str(out)]) == 0
    elapsed = time.perf_counter() - t0
    rows = read_rows(out)
    assert [int(r["n_bits"]) for r in rows] == [2**k for k in range(10, 25)]
    for r in rows:
        assert dispute_payload_bits(Variant.O1, int(r["n_bits"]), 256, 256, 1, 520) == 1032
        assert int(r["formula_bits"]) == 1032
        assert int(r["dispute_onchain_bits"]) == 1032 + int(r["dispute_framing_bits"])
        assert r["phase"] == "DisputeResolved"
    assert elapsed < 10.0
    with capsys.disabled():
        report(2, True, f"{len(rows)} sizes in {elapsed:.2f}s, dispute payload 1032 bits throughout")


@pytest.mark.criterion(3, "O(log N) dispute is (ceil(log2 M)+1)*256 + L, +256 per doubling, exact")
@pytest.mark.parametrize("L", [256, 368])
def test_logarithmic_dispute(L, tmp_path, capsys):
    out = tmp_path / "l.csv"
    assert main(["bench", "--variant", "ologn", "--size", "2^10..2^22", "--chunk-bits", str(L), "--out", str(out)]) == 0
    rows = read_rows(out)
    measured = []
    for r in rows:
        m = int(r["chunk_count"])
        assert m == math.ceil(int(r["n_bits"]) / L)
        expect = (math.ceil(math.log2(m)) + 1) * 256 + L if m > 1 else 256 + L
        assert int(r["formula_bits"]) == expect
        payload = int(r["dispute_onchain_bits"]) - int(r["dispute_framing_bits"])
        assert payload == expect
        measured.append(payload)
    steps = {b - a for a, b in zip(measured, measured[1:])}
    with capsys.disabled():
        report(3, steps == {256}, f"L={L}: {measured[0]}..{measured[-1]} bits, steps {sorted(steps)}")
    assert steps == {256}


@pytest.mark.criterion(4, "strategy matrix agrees 100% with the oracle, payouts per rule, < 60 s")
def test_settlement_matrix(capsys):
    t0 = time.perf_counter()
    total = agree = 0
    sellers = {s.behavior for s in seller_strategies(2)}
    buyers = {b.behavior for b in buyer_strategies()}
    assert len(sellers) >= 7 and len(buyers) >= 5
    for v in VARIANTS:
        for m in range(1, 17):
            for r in strategy_matrix(v, chunk_count=m, chunk_bits=64, seed=m):
                total += 1
                agree += r.agrees
                assert r.agrees, r
                assert r.honest_party_ok, r
                assert r.seller_delta + r.buyer_delta == 0, r
                if r.seller == "honest" and r.buyer == "honest":
                    assert r.phase == "Settled" and r.seller_delta == PRICE
                if r.seller.startswith(("corrupt_chunk", "corrupt_all", "wrong_key")) and r.buyer == "honest":
                    # all three escrows go to the buyer
                    assert r.phase == "DisputeResolved" and r.verdict == "seller"
                    assert r.buyer_delta == DEP_A and r.seller_delta == -DEP_A
                if r.seller == "honest" and r.buyer.startswith("false_dispute"):
                    assert r.phase == "DisputeResolved" and r.verdict == "buyer"
                    assert r.seller_delta == PRICE + DEP_B
    elapsed = time.perf_counter() - t0
    assert agree == total
    assert elapsed < 60.0
    with capsys.disabled():
        report(4, True, f"{agree}/{total} verdicts agree in {elapsed:.1f}s")


@pytest.mark.criterion(5, "disconnect at every tick boundary before reveal_key refunds with zero deltas")
def test_timeout_refund(capsys):
    checked = 0
    for v in VARIANTS:
        for buyer in ("honest", "silent_after_payload"):
            for tick in range(SCHEDULE["buyer_intent_and_fund"], SCHEDULE["reveal_key"] + 1):
                o = run(Scenario(v, size_bits=2048, chunk_bits=256, buyer=Strategy.buyer(buyer), disconnect_at=tick))
                assert o.balance_deltas == {"seller": 0, "buyer": 0}, (v, tick)
                if tick == SCHEDULE["buyer_intent_and_fund"]:
                    # the buyer's funding never reached the chain: nothing was locked
                    assert o.phase is Phase.CREATED and o.cost.bytes_by_action.keys() == {"register_certificate"}
                else:
                    assert o.phase is Phase.REFUNDED, (v, tick)
                checked += 1
    with capsys.disabled():
        report(5, True, f"{checked} disconnect runs, all deltas zero")


@pytest.mark.criterion(6, "10^4 random action sequences per variant keep coins conserved and non-negative")
@pytest.mark.parametrize("v", VARIANTS)
def test_coin_conservation(v, capsys):
    fx = fuzz_fixture(v, seed=6)
    rng = random.Random(f"conservation-{v.value}")
    phases = set()
    for _ in range(10_000):
        c, _ = fuzz_run(fx, rng, steps=rng.randrange(1, 16))
        assert c.ledger.total() == sum(c.initial_balances.values())
        assert min(c.ledger.balances.values()) >= 0
        phases.add(c.phase)
    assert {Phase.SETTLED, Phase.REFUNDED, Phase.DISPUTE_RESOLVED} <= phases
    with capsys.disabled():
        reached = sorted(p.value for p in phases if p.terminal)
        report(6, True, f"{v.value}: 10000 sequences, terminal phases reached {reached}")


@pytest.mark.criterion(7, "no plaintext on-chain for honest sellers; one ciphertext chunk and one hash per disputed run")
def test_privacy(capsys):
    honest_runs = disputed_runs = 0
    for v in VARIANTS:
        base = Scenario(v, size_bits=8 * 256, chunk_bits=256, seed=7)
        for b in buyer_strategies():
            o = run(replace(base, buyer=b))
            assert o.privacy.plaintext_chunks_onchain == [], (v, b.label)
            honest_runs += 1
        if v is Variant.ON:
            continue
        pairs = [(s, Strategy.buyer()) for s in seller_strategies(base.chunk_count)]
        pairs.append((Strategy.seller(), Strategy.buyer("false_dispute_genuine")))
        for s, b in pairs:
            o = run(replace(base, seller=s, buyer=b))
            if o.phase is not Phase.DISPUTE_RESOLVED:
                continue
            assert len(o.privacy.ciphertext_chunks_onchain) == 1, (v, s.label)
            assert len(o.privacy.chunk_hashes_onchain) == 1, (v, s.label)
            assert o.privacy.plaintext_chunks_onchain == []
            disputed_runs += 1
    assert disputed_runs >= 2 * 8
    with capsys.disabled():
        report(7, True, f"{honest_runs} honest-seller runs clean, {disputed_runs} disputed runs expose one chunk")


@pytest.mark.criterion(8, "Merkle: every single-field tamper rejected for M <= 8; completeness for M <= 16")
def test_merkle_soundness(capsys):
    rng = random.Random(8)
    tampers = 0
    for m in range(1, 9):
        ls = [rng.randbytes(8) for _ in range(m)]
        t = build(ls)
        for i in range(m):
            for leaf, proof in mutations(ls[i], t.prove(i)):
                assert not verify(t.root, leaf, proof, leaf_count=m)
                tampers += 1
    proofs = 0
    for m in range(1, 17):
        ls = [rng.randbytes(8) for _ in range(m)]
        t = build(ls)
        for i in range(m):
            p = t.prove(i)
            assert len(p.siblings) == depth_for(m)
            assert verify(t.root, ls[i], p, leaf_count=m)
            proofs += 1
    with capsys.disabled():
        report(8, True, f"{tampers} tampers rejected, {proofs} proofs complete")


@pytest.mark.criterion(9, "repeated runs with the same seed give byte-identical transcripts")
def test_determinism(tmp_path, capsys):
    pairs = 0
    for v in VARIANTS:
        for seller, chunk in (("honest", 0), ("corrupt_chunk", 2), ("replay_signed_chunk", 1)):
            scenario = tmp_path / f"{v.value}-{seller}.json"
            scenario.write_text(json.dumps({
                "variant": v.value, "size_bits": 4096, "chunk_bits": 256,
                "seller": {"behavior": seller, "chunk": chunk},
            }))
            outs = []
            for k in range(2):
                d = tmp_path / f"{scenario.stem}-{k}"
                assert main(["run", str(scenario), "--seed", "9", "--out", str(d)]) == 0
                outs.append((d / "transcript.jsonl").read_bytes())
            # a fresh interpreter with a different hash seed as well
            d = tmp_path / f"{scenario.stem}-sub"
            env = dict(os.environ, PYTHONHASHSEED="12345")
            subprocess.run([sys.executable, "-m", "blockmark.cli", "run", str(scenario), "--seed", "9", "--out", str(d)],
                           check=True, capture_output=True, env=env)
            outs.append((d / "transcript.jsonl").read_bytes())
            assert outs[0] == outs[1] == outs[2]
            pairs += 1
    with capsys.disabled():
        report(9, True, f"{pairs} scenarios reproduced byte-for-byte across 3 runs each")
