"""End-to-end trade simulation with scripted (possibly adversarial) parties.

A trade follows a fixed logical-time schedule (see ``SCHEDULE``).  Parties
read the contract state, exchange the off-chain payload through an
in-process channel and act according to their :class:`Strategy`.  Network
faults suppress every party message at or after ``disconnect_at``; contract
timeouts still fire because they are evaluated by the chain itself.
"""

from __future__ import annotations

import csv
import json
import random
from dataclasses import asdict, dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .chunks import (
    Certificate,
    OffchainPayload,
    PayloadElement,
    Variant,
    certify,
    chunk_hash_root,
    dispute_framing_bytes,
    dispute_payload_bits,
    element_message,
    make_payload,
    payload_size_bytes,
    split,
)
from .contract import (
    DEFAULT_FUNDING_WINDOW,
    DEFAULT_GRACE_WINDOW,
    Contract,
    ContractError,
    CostReport,
    DisputeSubmission,
    Party,
    Phase,
    Verdict,
    new_contract,
)
from .crypto import DEFAULT_SCHEME, KeyPair, Scheme, SymmetricKey
from .merkle import MerkleTree, depth_for

SELLER_ID = "alice"
BUYER_ID = "bob"

SCHEDULE = {
    "register_certificate": 0,
    "buyer_intent_and_fund": 1,
    "seller_fund": 2,
    "deliver_and_commit": 3,
    "buyer_ack": 4,
    "reveal_key": 5,
    "dispute": 6,
}


class ScenarioError(ValueError):
    pass


class SellerBehavior(str, Enum):
    HONEST = "honest"
    CORRUPT_CHUNK = "corrupt_chunk"
    CORRUPT_ALL = "corrupt_all"
    WRONG_KEY = "wrong_key"
    WRONG_COMMITMENT = "wrong_commitment"
    SILENT_AFTER_FUNDING = "silent_after_funding"
    REPLAY_SIGNED_CHUNK = "replay_signed_chunk"


class BuyerBehavior(str, Enum):
    HONEST = "honest"
    FALSE_DISPUTE_FABRICATED = "false_dispute_fabricated"
    FALSE_DISPUTE_GENUINE = "false_dispute_genuine"
    NO_THEN_ABORT = "no_then_abort"
    SILENT_AFTER_PAYLOAD = "silent_after_payload"


FABRICATIONS = ("random_leaf", "wrong_claim", "tampered_proof", "tampered_signature")


@dataclass(frozen=True)
class Strategy:
    role: Party
    behavior: str
    chunk: int = 0
    fabrication: str = "wrong_claim"

    @classmethod
    def seller(cls, behavior: str | SellerBehavior = "honest", chunk: int = 0) -> "Strategy":
        return cls(Party.SELLER, SellerBehavior(behavior).value, chunk=chunk)

    @classmethod
    def buyer(cls, behavior: str | BuyerBehavior = "honest", fabrication: str = "wrong_claim") -> "Strategy":
        return cls(Party.BUYER, BuyerBehavior(behavior).value, fabrication=fabrication)

    @property
    def honest(self) -> bool:
        return self.behavior == "honest"

    @property
    def label(self) -> str:
        if self.behavior in ("corrupt_chunk", "replay_signed_chunk"):
            return f"{self.behavior}({self.chunk})"
        if self.behavior == "false_dispute_fabricated":
            return f"{self.behavior}[{self.fabrication}]"
        return self.behavior

    def to_dict(self) -> dict:
        d = {"behavior": self.behavior}
        if self.role is Party.SELLER:
            d["chunk"] = self.chunk
        else:
            d["fabrication"] = self.fabrication
        return d


@dataclass(frozen=True)
class Scenario:
    variant: Variant
    size_bits: int = 8192
    chunk_bits: int = 256
    seed: int = 0
    data: Optional[bytes] = None
    scheme: Scheme = DEFAULT_SCHEME
    price: int = 1000
    deposit_a: int = 500
    deposit_b: int = 500
    initial_balance: int = 10_000
    seller: Strategy = field(default_factory=Strategy.seller)
    buyer: Strategy = field(default_factory=Strategy.buyer)
    disconnect_at: Optional[int] = None
    drop_offchain_payload: bool = False
    funding_window: int = DEFAULT_FUNDING_WINDOW
    grace_window: int = DEFAULT_GRACE_WINDOW

    @property
    def n_bits(self) -> int:
        return 8 * len(self.data) if self.data is not None else self.size_bits

    @property
    def chunk_count(self) -> int:
        return -(-self.n_bits // self.chunk_bits)

    def validate(self) -> "Scenario":
        try:
            variant = Variant(self.variant)
        except ValueError:
            raise ScenarioError(f"unknown variant {self.variant!r}") from None
        if self.data is None and (self.size_bits <= 0 or self.size_bits % 8):
            raise ScenarioError("size_bits must be a positive multiple of 8")
        if self.data is not None and not self.data:
            raise ScenarioError("data must be non-empty")
        if self.chunk_bits <= 0 or self.chunk_bits % 8:
            raise ScenarioError("chunk_bits must be a positive multiple of 8")
        if self.seller.role is not Party.SELLER or self.buyer.role is not Party.BUYER:
            raise ScenarioError("strategies are assigned to the wrong roles")
        try:
            SellerBehavior(self.seller.behavior)
            BuyerBehavior(self.buyer.behavior)
        except ValueError as exc:
            raise ScenarioError(str(exc)) from None
        if not 0 <= self.seller.chunk < self.chunk_count:
            raise ScenarioError(f"chunk index {self.seller.chunk} outside [0, {self.chunk_count})")
        if self.buyer.fabrication not in FABRICATIONS:
            raise ScenarioError(f"unknown fabrication {self.buyer.fabrication!r}")
        if self.price <= 0 or self.deposit_a <= 0 or self.deposit_b < 0:
            raise ScenarioError("price and seller deposit must be positive, buyer deposit non-negative")
        if self.initial_balance < max(self.price + self.deposit_b, self.deposit_a):
            raise ScenarioError("initial balance cannot cover the deposits")
        if self.disconnect_at is not None and self.disconnect_at < 1:
            raise ScenarioError("disconnect_at must be >= 1 (tick 0 is certification)")
        if self.funding_window <= SCHEDULE["reveal_key"] or self.grace_window <= 1:
            raise ScenarioError("windows too short for the trade schedule")
        return self

    def to_dict(self) -> dict:
        d = {
            "variant": Variant(self.variant).value,
            "size_bits": self.size_bits,
            "chunk_bits": self.chunk_bits,
            "seed": self.seed,
            "scheme": self.scheme.descriptor(),
            "deposits": {"price": self.price, "seller": self.deposit_a, "buyer": self.deposit_b},
            "initial_balance": self.initial_balance,
            "seller": self.seller.to_dict(),
            "buyer": self.buyer.to_dict(),
            "network": {"disconnect_at": self.disconnect_at, "drop_offchain_payload": self.drop_offchain_payload},
            "windows": {"funding": self.funding_window, "grace": self.grace_window},
        }
        if self.data is not None:
            d["data_hex"] = self.data.hex()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        try:
            deposits = d.get("deposits", {})
            network = d.get("network", {})
            windows = d.get("windows", {})
            seller = d.get("seller", {})
            buyer = d.get("buyer", {})
            scenario = cls(
                variant=Variant(d["variant"]),
                size_bits=int(d.get("size_bits", 8192)),
                chunk_bits=int(d.get("chunk_bits", 256)),
                seed=int(d.get("seed", 0)),
                data=bytes.fromhex(d["data_hex"]) if "data_hex" in d else None,
                scheme=Scheme.from_descriptor(d.get("scheme", {})),
                price=int(deposits.get("price", 1000)),
                deposit_a=int(deposits.get("seller", 500)),
                deposit_b=int(deposits.get("buyer", 500)),
                initial_balance=int(d.get("initial_balance", 10_000)),
                seller=Strategy.seller(seller.get("behavior", "honest"), int(seller.get("chunk", 0))),
                buyer=Strategy.buyer(buyer.get("behavior", "honest"), buyer.get("fabrication", "wrong_claim")),
                disconnect_at=network.get("disconnect_at"),
                drop_offchain_payload=bool(network.get("drop_offchain_payload", False)),
                funding_window=int(windows.get("funding", DEFAULT_FUNDING_WINDOW)),
                grace_window=int(windows.get("grace", DEFAULT_GRACE_WINDOW)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"invalid scenario: {exc}") from None
        return scenario.validate()

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"{path}: {exc}") from None
        return cls.from_dict(raw)


class Channel:
    """In-process off-chain mailbox with scripted faults."""

    def __init__(self, disconnect_at: Optional[int] = None, drop_payload: bool = False):
        self.disconnect_at = disconnect_at
        self.drop_payload = drop_payload
        self.delivered: Optional[OffchainPayload] = None
        self.sent_bytes = 0

    def up(self, now: int) -> bool:
        return self.disconnect_at is None or now < self.disconnect_at

    def send_payload(self, payload: OffchainPayload, now: int, scheme: Scheme) -> None:
        if not self.up(now):
            return
        self.sent_bytes += len(payload.to_bytes(scheme))
        if not self.drop_payload:
            self.delivered = payload


def _flip(b: bytes, pos: int = 0) -> bytes:
    return b[:pos] + bytes([b[pos] ^ 0xFF]) + b[pos + 1 :]


class Seller:
    def __init__(self, strategy: Strategy, variant: Variant, data: bytes, chunk_bits: int,
                 key: SymmetricKey, prior_key: SymmetricKey, keys: KeyPair, scheme: Scheme):
        self.strategy = strategy
        self.variant = variant
        self.data = data
        self.chunk_bits = chunk_bits
        self.key = key
        self.prior_key = prior_key
        self.keys = keys
        self.scheme = scheme

    @property
    def silent(self) -> bool:
        return self.strategy.behavior == SellerBehavior.SILENT_AFTER_FUNDING

    def claimed_data(self) -> bytes:
        """The data the seller actually encrypts (D-bar)."""
        behavior = self.strategy.behavior
        step = self.chunk_bits // 8
        if behavior == SellerBehavior.CORRUPT_CHUNK:
            return _flip(self.data, self.strategy.chunk * step)
        if behavior == SellerBehavior.CORRUPT_ALL:
            out = self.data
            for pos in range(0, len(out), step):
                out = _flip(out, pos)
            return out
        return self.data

    def payload(self) -> OffchainPayload:
        s = self.scheme
        behavior = self.strategy.behavior
        fake = split(self.claimed_data(), self.chunk_bits)
        if self.variant is Variant.ON:
            key = self.prior_key if behavior == SellerBehavior.REPLAY_SIGNED_CHUNK else self.key
            return make_payload(Variant.ON, fake, key, s)
        real = split(self.data, self.chunk_bits)
        elements = []
        for m, (true_chunk, sent_chunk) in enumerate(zip(real.chunks, fake.chunks)):
            h = s.hash(true_chunk)
            key = self.key
            if behavior == SellerBehavior.REPLAY_SIGNED_CHUNK and m == self.strategy.chunk:
                key = self.prior_key
            ct = s.encrypt(key, m, sent_chunk)
            sig = b""
            if self.variant is Variant.O1:
                sig = s.sign(self.keys, element_message(m, h, ct, s))
                if behavior == SellerBehavior.WRONG_COMMITMENT and m == 0:
                    sig = _flip(sig)
            elements.append(PayloadElement(h, ct, sig))
        return OffchainPayload(self.variant, tuple(elements))

    def commitment(self, payload: OffchainPayload) -> bytes:
        value = commitment_for(payload, self.scheme)
        if self.strategy.behavior == SellerBehavior.WRONG_COMMITMENT:
            value = self.scheme.hash(b"not-the-payload" + value)
        return value

    def key_to_reveal(self) -> SymmetricKey:
        if self.strategy.behavior == SellerBehavior.WRONG_KEY:
            return self.prior_key
        return self.key


def commitment_for(payload: OffchainPayload, scheme: Scheme) -> bytes:
    """What an honest seller commits to for ``payload`` (nothing for O(1))."""
    if payload.variant is Variant.ON:
        return scheme.hash(payload.elements[0].ciphertext)
    if payload.variant is Variant.OLOGN:
        return MerkleTree([e.leaf for e in payload.elements], scheme.hash).root
    return b""


class Buyer:
    def __init__(self, strategy: Strategy, variant: Variant, certificate: Certificate,
                 scheme: Scheme, rng: random.Random):
        self.strategy = strategy
        self.variant = variant
        self.certificate = certificate
        self.scheme = scheme
        self.rng = rng
        self.payload: Optional[OffchainPayload] = None

    def pre_checks(self, contract: Contract) -> bool:
        """Checks the buyer runs before acknowledging (nothing secret needed)."""
        p, s, cert = self.payload, self.scheme, self.certificate
        if self.variant is Variant.ON:
            return s.hash(p.elements[0].ciphertext) == contract.committed
        if len(p) != cert.chunk_count:
            return False
        if chunk_hash_root([e.chunk_hash for e in p.elements], s) != cert.root:
            return False
        if self.variant is Variant.OLOGN:
            return commitment_for(p, s) == contract.committed
        return all(
            s.verify(contract.seller_public, element_message(m, e.chunk_hash, e.ciphertext, s), e.signature)
            for m, e in enumerate(p.elements)
        )

    def ack(self, contract: Contract) -> Optional[bool]:
        """True/False for Yes/No; None means stay silent."""
        behavior = self.strategy.behavior
        if behavior == BuyerBehavior.SILENT_AFTER_PAYLOAD:
            return None
        if behavior == BuyerBehavior.NO_THEN_ABORT:
            return False
        if self.payload is None:
            return None
        return self.pre_checks(contract)

    def first_bad_chunk(self, key: SymmetricKey) -> Optional[int]:
        s = self.scheme
        if self.variant is Variant.ON:
            try:
                ok = s.hash(s.decrypt(key, 0, self.payload.elements[0].ciphertext)) == self.certificate.root
            except ValueError:
                ok = False
            return None if ok else 0
        for m, e in enumerate(self.payload.elements):
            try:
                if s.hash(s.decrypt(key, m, e.ciphertext)) != e.chunk_hash:
                    return m
            except ValueError:
                return m
        return None

    def genuine_submission(self, index: int) -> DisputeSubmission:
        e = self.payload.elements[index]
        if self.variant is Variant.ON:
            return DisputeSubmission(Variant.ON, e.ciphertext)
        if self.variant is Variant.OLOGN:
            tree = MerkleTree([x.leaf for x in self.payload.elements], self.scheme.hash)
            return DisputeSubmission(Variant.OLOGN, e.ciphertext, e.chunk_hash, proof=tree.prove(index))
        return DisputeSubmission(Variant.O1, e.ciphertext, e.chunk_hash, signature=e.signature, index=index)

    def fabricated_submission(self) -> DisputeSubmission:
        genuine = self.genuine_submission(0)
        mode = self.strategy.fabrication
        rb = self.rng.randbytes
        if self.variant is Variant.ON:
            if mode == "random_leaf":
                return replace(genuine, ciphertext=rb(len(genuine.ciphertext)))
            return replace(genuine, ciphertext=_flip(genuine.ciphertext))
        if mode == "random_leaf":
            return replace(
                genuine,
                ciphertext=rb(len(genuine.ciphertext)),
                claimed_hash=rb(len(genuine.claimed_hash)),
                signature=rb(len(genuine.signature)),
            )
        if mode == "wrong_claim":
            return replace(genuine, claimed_hash=self.scheme.hash(b"fabricated" + genuine.claimed_hash))
        if self.variant is Variant.OLOGN and (mode == "tampered_proof" or mode == "tampered_signature"):
            proof = genuine.proof
            if proof.siblings:
                (d, side), *rest = proof.siblings
                proof = replace(proof, siblings=((_flip(d), side), *rest))
            else:
                proof = replace(proof, leaf_index=proof.leaf_index + 1)
            return replace(genuine, proof=proof)
        return replace(genuine, signature=_flip(genuine.signature))

    def dispute(self, key: SymmetricKey) -> Optional[DisputeSubmission]:
        behavior = self.strategy.behavior
        if self.payload is None:
            return None
        if behavior == BuyerBehavior.FALSE_DISPUTE_FABRICATED:
            return self.fabricated_submission()
        if behavior == BuyerBehavior.FALSE_DISPUTE_GENUINE:
            return self.genuine_submission(0)
        bad = self.first_bad_chunk(key)
        return None if bad is None else self.genuine_submission(bad)

    def received_valid_data(self, key: Optional[SymmetricKey]) -> bool:
        if self.payload is None or key is None:
            return False
        s, cert = self.scheme, self.certificate
        try:
            if self.variant is Variant.ON:
                return s.hash(s.decrypt(key, 0, self.payload.elements[0].ciphertext)) == cert.root
            plain = [s.decrypt(key, m, e.ciphertext) for m, e in enumerate(self.payload.elements)]
        except ValueError:
            return False
        return len(plain) == cert.chunk_count and chunk_hash_root([s.hash(c) for c in plain], s) == cert.root


def oracle_adjudicate(
    variant: Variant,
    payload: Optional[OffchainPayload],
    key: SymmetricKey,
    certificate: Certificate,
    submission: Optional[DisputeSubmission] = None,
    committed: Optional[bytes] = None,
    seller_public: Optional[bytes] = None,
    scheme: Scheme = DEFAULT_SCHEME,
) -> Optional[Party]:
    """Judge a dispute from complete information; None when there is no dispute.

    Evidence is genuine only if it is byte-identical to what the seller
    actually delivered (and committed to or signed).  Genuine evidence that
    fails to decrypt to its claimed hash convicts the seller; anything else
    convicts the buyer.
    """
    if submission is None:
        return None
    if payload is None:
        return Party.BUYER
    variant = Variant(variant)
    s = scheme
    if variant is Variant.ON:
        ct = payload.elements[0].ciphertext
        if submission.ciphertext != ct or s.hash(ct) != committed:
            return Party.BUYER
        try:
            plain = s.decrypt(key, 0, ct)
        except ValueError:
            return Party.SELLER
        return Party.BUYER if s.hash(plain) == certificate.root else Party.SELLER

    if variant is Variant.OLOGN:
        index = submission.proof.leaf_index
        if index >= len(payload):
            return Party.BUYER
        tree = MerkleTree([e.leaf for e in payload.elements], s.hash)
        e = payload.elements[index]
        if tree.root != committed or tree.prove(index) != submission.proof:
            return Party.BUYER
        if (e.chunk_hash, e.ciphertext) != (submission.claimed_hash, submission.ciphertext):
            return Party.BUYER
    else:
        index = submission.index
        if index >= len(payload):
            return Party.BUYER
        e = payload.elements[index]
        if (e.chunk_hash, e.ciphertext, e.signature) != (submission.claimed_hash, submission.ciphertext, submission.signature):
            return Party.BUYER
        if not s.verify(seller_public, element_message(index, e.chunk_hash, e.ciphertext, s), e.signature):
            return Party.BUYER
    try:
        plain = s.decrypt(key, index, e.ciphertext)
    except ValueError:
        return Party.SELLER
    return Party.BUYER if s.hash(plain) == e.chunk_hash else Party.SELLER


@dataclass
class PrivacyReport:
    plaintext_chunks_onchain: list[int]
    ciphertext_chunks_onchain: list[int]
    chunk_hashes_onchain: list[int]
    key_onchain: bool

    @property
    def revealed_chunks(self) -> list[int]:
        """Chunks anyone can decrypt from chain data alone."""
        return self.ciphertext_chunks_onchain if self.key_onchain else []


def privacy_scan(onchain: Sequence[bytes], data: bytes, chunk_bits: int,
                 payload: Optional[OffchainPayload], scheme: Scheme, key_onchain: bool = False) -> PrivacyReport:
    chunks = split(data, chunk_bits).chunks

    def present(needle: bytes) -> bool:
        return any(needle in p for p in onchain)

    plain = [m for m, c in enumerate(chunks) if present(c)]
    hashes = [m for m, c in enumerate(chunks) if present(scheme.hash(c))]
    cts = []
    if payload is not None:
        cts = [m for m, e in enumerate(payload.elements) if present(e.ciphertext)]
    return PrivacyReport(plain, cts, hashes, key_onchain)


@dataclass
class TradeOutcome:
    scenario: Scenario
    phase: Phase
    verdict: Optional[Verdict]
    oracle: Optional[Party]
    balance_deltas: dict
    buyer_received_valid_data: bool
    cost: CostReport
    offchain_bytes: int
    privacy: PrivacyReport
    transcript: list[str]
    notes: list[str] = field(default_factory=list)

    @property
    def oracle_agrees(self) -> bool:
        return (self.verdict.dishonest if self.verdict else None) == self.oracle

    def summary(self) -> dict:
        return {
            "variant": Variant(self.scenario.variant).value,
            "seller": self.scenario.seller.label,
            "buyer": self.scenario.buyer.label,
            "phase": self.phase.value,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "oracle": self.oracle.value if self.oracle else None,
            "oracle_agrees": self.oracle_agrees,
            "balance_deltas": self.balance_deltas,
            "buyer_received_valid_data": self.buyer_received_valid_data,
            "cost": self.cost.to_dict(),
            "offchain_bytes": self.offchain_bytes,
            "privacy": {
                "plaintext_chunks_onchain": self.privacy.plaintext_chunks_onchain,
                "ciphertext_chunks_onchain": self.privacy.ciphertext_chunks_onchain,
                "chunk_hashes_onchain": self.privacy.chunk_hashes_onchain,
                "revealed_chunks": self.privacy.revealed_chunks,
            },
            "notes": self.notes,
        }


def _try(action, notes: list[str], *args, **kwargs):
    try:
        return action(*args, **kwargs)
    except ContractError as exc:
        notes.append(f"rejected {action.__name__}: {exc}")
        return None


def run(scenario: Scenario, out_dir: str | Path | None = None) -> TradeOutcome:
    """Play one trade to a terminal state and account for everything."""
    scenario.validate()
    variant = Variant(scenario.variant)
    s = scenario.scheme
    rng = random.Random(scenario.seed)
    data = scenario.data if scenario.data is not None else rng.randbytes(scenario.size_bits // 8)
    carol = s.generate_keypair(rng)
    alice_keys = s.generate_keypair(rng)
    key = s.generate_key(rng)
    prior_key = s.generate_key(rng)
    certificate = certify(data, scenario.chunk_bits, variant, carol, s)

    contract = new_contract(
        variant,
        s,
        balances={SELLER_ID: scenario.initial_balance, BUYER_ID: scenario.initial_balance},
        funding_window=scenario.funding_window,
        grace_window=scenario.grace_window,
    )
    contract.register_certificate(certificate, now=SCHEDULE["register_certificate"])
    net = Channel(scenario.disconnect_at, scenario.drop_offchain_payload)
    seller = Seller(scenario.seller, variant, data, scenario.chunk_bits, key, prior_key, alice_keys, s)
    buyer = Buyer(scenario.buyer, variant, certificate, s, random.Random(rng.randbytes(16)))
    notes: list[str] = []
    payload: Optional[OffchainPayload] = None
    submission: Optional[DisputeSubmission] = None

    t = SCHEDULE["buyer_intent_and_fund"]
    if net.up(t):
        _try(contract.buyer_intent_and_fund, notes, BUYER_ID, certificate.root, scenario.price, scenario.deposit_b, t)

    t = SCHEDULE["seller_fund"]
    if net.up(t) and contract.phase is Phase.BUYER_FUNDED:
        _try(contract.seller_fund, notes, SELLER_ID, scenario.deposit_a, t, seller_public=alice_keys.public)

    t = SCHEDULE["deliver_and_commit"]
    if net.up(t) and contract.phase is Phase.SELLER_FUNDED and not seller.silent:
        payload = seller.payload()
        net.send_payload(payload, t, s)
        buyer.payload = net.delivered
        if contract.has_commit:
            _try(contract.commit, notes, SELLER_ID, seller.commitment(payload), t)

    t = SCHEDULE["buyer_ack"]
    ack_phase = Phase.COMMITTED if contract.has_commit else Phase.SELLER_FUNDED
    if net.up(t) and contract.phase is ack_phase:
        answer = buyer.ack(contract)
        if answer is not None:
            _try(contract.buyer_ack, notes, BUYER_ID, answer, t)

    t = SCHEDULE["reveal_key"]
    if net.up(t) and contract.phase is Phase.ACKED and not seller.silent:
        _try(contract.reveal_key, notes, SELLER_ID, seller.key_to_reveal(), t)

    t = SCHEDULE["dispute"]
    if net.up(t) and contract.phase is Phase.KEY_REVEALED:
        submission = buyer.dispute(contract.revealed_key)
        if submission is not None:
            if _try(contract.dispute, notes, BUYER_ID, submission, t) is None:
                submission = None

    deadlines = [d for d in (contract.funding_deadline, contract.grace_deadline) if d is not None]
    if deadlines:
        contract.tick(max(deadlines) + 1)

    oracle = None
    if submission is not None:
        oracle = oracle_adjudicate(
            variant, buyer.payload, contract.revealed_key, certificate, submission,
            committed=contract.committed, seller_public=contract.seller_public, scheme=s,
        )
    if scenario.seller.behavior == SellerBehavior.REPLAY_SIGNED_CHUNK:
        notes.append("replay strategy enabled: per-chunk signatures bind neither a session nor the key")

    onchain = [r.payload for r in contract.log]
    privacy = privacy_scan(onchain, data, scenario.chunk_bits, payload, s, contract.revealed_key is not None)
    if scenario.chunk_bits < 64:
        notes.append("chunks shorter than 8 bytes make the privacy substring scan unreliable")

    balances = contract.ledger.balances
    outcome = TradeOutcome(
        scenario=scenario,
        phase=contract.phase,
        verdict=contract.verdict,
        oracle=oracle,
        balance_deltas={
            "seller": balances[SELLER_ID] - scenario.initial_balance,
            "buyer": balances[BUYER_ID] - scenario.initial_balance,
        },
        buyer_received_valid_data=buyer.received_valid_data(contract.revealed_key),
        cost=contract.onchain_footprint(),
        offchain_bytes=net.sent_bytes,
        privacy=privacy,
        transcript=contract.transcript_lines(),
        notes=notes,
    )
    if out_dir is not None:
        write_outcome(outcome, out_dir)
    return outcome


def write_outcome(outcome: TradeOutcome, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "transcript.jsonl").write_text("\n".join(outcome.transcript) + "\n")
    (out / "outcome.json").write_text(json.dumps(outcome.summary(), indent=2, sort_keys=True) + "\n")


# strategy-product matrix -----------------------------------------------------


def seller_strategies(chunk_count: int) -> list[Strategy]:
    out = [Strategy.seller("honest")]
    out += [Strategy.seller("corrupt_chunk", w) for w in range(chunk_count)]
    out += [Strategy.seller(b) for b in ("corrupt_all", "wrong_key", "wrong_commitment", "silent_after_funding")]
    out += [Strategy.seller("replay_signed_chunk", w) for w in range(chunk_count)]
    return out


def buyer_strategies() -> list[Strategy]:
    out = [Strategy.buyer("honest")]
    out += [Strategy.buyer("false_dispute_fabricated", f) for f in FABRICATIONS]
    out += [Strategy.buyer(b) for b in ("false_dispute_genuine", "no_then_abort", "silent_after_payload")]
    return out


@dataclass
class MatrixRow:
    variant: str
    seller: str
    buyer: str
    phase: str
    verdict: Optional[str]
    oracle: Optional[str]
    agrees: bool
    seller_delta: int
    buyer_delta: int
    buyer_received_valid_data: bool
    honest_party_ok: bool


def honest_party_ok(outcome: TradeOutcome) -> bool:
    """No honest party ends worse off than the trade it agreed to."""
    sc = outcome.scenario
    ok = True
    if sc.seller.honest:
        ok &= outcome.balance_deltas["seller"] >= 0
    if sc.buyer.honest:
        d = outcome.balance_deltas["buyer"]
        ok &= d >= 0 or (d == -sc.price and outcome.buyer_received_valid_data)
    return ok


def strategy_matrix(
    variant: Variant,
    chunk_count: int = 4,
    chunk_bits: int = 64,
    seed: int = 0,
    scheme: Scheme = DEFAULT_SCHEME,
) -> list[MatrixRow]:
    """Run every seller x buyer behavior pair and compare verdicts with the oracle."""
    variant = Variant(variant)
    base = Scenario(variant, size_bits=chunk_count * chunk_bits, chunk_bits=chunk_bits, seed=seed, scheme=scheme)
    rows = []
    for sellr in seller_strategies(chunk_count):
        for buyr in buyer_strategies():
            o = run(replace(base, seller=sellr, buyer=buyr))
            rows.append(
                MatrixRow(
                    variant=variant.value,
                    seller=sellr.label,
                    buyer=buyr.label,
                    phase=o.phase.value,
                    verdict=o.verdict.dishonest.value if o.verdict else None,
                    oracle=o.oracle.value if o.oracle else None,
                    agrees=o.oracle_agrees,
                    seller_delta=o.balance_deltas["seller"],
                    buyer_delta=o.balance_deltas["buyer"],
                    buyer_received_valid_data=o.buyer_received_valid_data,
                    honest_party_ok=honest_party_ok(o),
                )
            )
    return rows


# cost sweeps -------------------------------------------------------------------


@dataclass
class SweepRow:
    variant: str
    n_bits: int
    chunk_bits: int
    chunk_count: int
    phase: str
    happy_onchain_bits: int
    dispute_onchain_bits: int
    dispute_framing_bits: int
    formula_bits: int
    offchain_bits: int
    dispute_hashes: int
    dispute_decrypt_bits: int
    dispute_sig_verifies: int
    dispute_merkle_folds: int


SWEEP_COLUMNS = [f.name for f in SweepRow.__dataclass_fields__.values()]


def _formula(variant: Variant, n_bits: int, chunk_bits: int, scheme: Scheme) -> int:
    return dispute_payload_bits(variant, n_bits, chunk_bits, scheme.hash_bits, scheme.alpha, scheme.sig_bits)


def _framing_bits(variant: Variant, n_bits: int, chunk_bits: int) -> int:
    depth = depth_for(-(-n_bits // chunk_bits)) if variant is Variant.OLOGN else 0
    return 8 * dispute_framing_bytes(variant, depth)


def _row(variant, n_bits, chunk_bits, chunk_count, phase, happy: CostReport, disputed: CostReport, offchain_bytes, scheme):
    ops = disputed.dispute_ops
    return SweepRow(
        variant=variant.value,
        n_bits=n_bits,
        chunk_bits=chunk_bits,
        chunk_count=chunk_count,
        phase=phase.value,
        happy_onchain_bits=happy.onchain_bits,
        dispute_onchain_bits=8 * disputed.dispute_bytes,
        dispute_framing_bits=_framing_bits(variant, n_bits, chunk_bits),
        formula_bits=_formula(variant, n_bits, chunk_bits, scheme),
        offchain_bits=8 * offchain_bytes,
        dispute_hashes=ops["hashes"],
        dispute_decrypt_bits=ops["decrypt_bits"],
        dispute_sig_verifies=ops["sig_verifies"],
        dispute_merkle_folds=ops["merkle_folds"],
    )


def measure(variant: Variant, n_bits: int, chunk_bits: int, scheme: Scheme = DEFAULT_SCHEME, seed: int = 0) -> SweepRow:
    """Drive two contracts (dispute-free, and disputed on chunk 0) without full party simulation.

    Only the work the contract and the dispute evidence need is done: the
    O(1) variant signs a single element, so large sizes stay cheap.
    """
    variant = Variant(variant)
    s = scheme
    rng = random.Random(seed)
    data = rng.randbytes(n_bits // 8)
    carol = s.generate_keypair(rng)
    alice = s.generate_keypair(rng)
    key = s.generate_key(rng)
    cert = certify(data, chunk_bits, variant, carol, s)
    fake = _flip(data, 0)

    if variant is Variant.ON:
        honest_commit = s.hash(s.encrypt(key, 0, data))
        ct = s.encrypt(key, 0, fake)
        disputed_commit = s.hash(ct)
        submission = DisputeSubmission(Variant.ON, ct)
        chunk_count, ct_len = 1, len(ct)
    else:
        chunks = split(data, chunk_bits).chunks
        chunk_count = len(chunks)
        h0 = s.hash(chunks[0])
        ct0 = s.encrypt(key, 0, _flip(chunks[0], 0))
        ct_len = len(ct0)
        honest_commit = disputed_commit = b""
        if variant is Variant.OLOGN:
            leaves = [s.hash(c) + s.encrypt(key, m, c) for m, c in enumerate(chunks)]
            honest_commit = MerkleTree(leaves, s.hash).root
            leaves[0] = h0 + ct0
            tree = MerkleTree(leaves, s.hash)
            disputed_commit = tree.root
            submission = DisputeSubmission(Variant.OLOGN, ct0, h0, proof=tree.prove(0))
        else:
            sig = s.sign(alice, element_message(0, h0, ct0, s))
            submission = DisputeSubmission(Variant.O1, ct0, h0, signature=sig, index=0)

    def drive(commit_value: bytes) -> Contract:
        c = new_contract(variant, s, balances={SELLER_ID: 10_000, BUYER_ID: 10_000})
        c.register_certificate(cert, SCHEDULE["register_certificate"])
        c.buyer_intent_and_fund(BUYER_ID, cert.root, 1000, 500, SCHEDULE["buyer_intent_and_fund"])
        c.seller_fund(SELLER_ID, 500, SCHEDULE["seller_fund"], seller_public=alice.public)
        if c.has_commit:
            c.commit(SELLER_ID, commit_value, SCHEDULE["deliver_and_commit"])
        c.buyer_ack(BUYER_ID, True, SCHEDULE["buyer_ack"])
        c.reveal_key(SELLER_ID, key, SCHEDULE["reveal_key"])
        return c

    happy = drive(honest_commit)
    happy.tick(happy.grace_deadline + 1)
    disputed = drive(disputed_commit)
    disputed.dispute(BUYER_ID, submission, SCHEDULE["dispute"])
    offchain = payload_size_bytes(variant, chunk_count, ct_len, s)
    return _row(variant, n_bits, chunk_bits, chunk_count, disputed.phase,
                happy.onchain_footprint(), disputed.onchain_footprint(), offchain, s)


def sweep(base: Scenario, sizes: Iterable[int], simulate: bool = True) -> list[SweepRow]:
    """Cost table over data sizes (bits).

    With ``simulate`` every size runs two complete trades (honest, and a
    seller corrupting chunk 0 against an honest buyer); otherwise
    :func:`measure` drives the contracts directly.
    """
    variant = Variant(base.variant)
    rows = []
    for n in sorted(sizes):
        if not simulate:
            rows.append(measure(variant, n, base.chunk_bits, base.scheme, base.seed))
            continue
        sc = replace(base, size_bits=n, data=None, seller=Strategy.seller(), buyer=Strategy.buyer())
        happy = run(sc)
        disputed = run(replace(sc, seller=Strategy.seller("corrupt_chunk", 0)))
        rows.append(
            _row(variant, n, base.chunk_bits, sc.chunk_count if variant is not Variant.ON else 1,
                 disputed.phase, happy.cost, disputed.cost, happy.offchain_bytes, base.scheme)
        )
    return rows


def write_csv(rows: Sequence, path: str | Path, header: Optional[dict] = None) -> None:
    """Write dataclass rows as CSV; ``header`` goes into a leading ``#`` comment line."""
    rows = list(rows)
    columns = [f for f in rows[0].__dataclass_fields__] if rows else SWEEP_COLUMNS
    with open(path, "w", newline="") as fh:
        if header is not None:
            fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.DictWriter(fh, fieldnames=columns)
        w.writeheader()
        for r in rows:
            w.writerow(asdict(r))


# random action sequences -------------------------------------------------------


@dataclass(frozen=True)
class FuzzFixture:
    """Precomputed material for random contract driving (crypto done once)."""

    variant: Variant
    scheme: Scheme
    certificate: Certificate
    seller_public: bytes
    key: SymmetricKey
    other_key: SymmetricKey
    commitments: tuple[bytes, ...]
    submissions: tuple[DisputeSubmission, ...]


def fuzz_fixture(variant: Variant, scheme: Scheme = DEFAULT_SCHEME, seed: int = 0,
                 chunk_count: int = 4, chunk_bits: int = 64) -> FuzzFixture:
    variant = Variant(variant)
    s = scheme
    rng = random.Random(seed)
    data = rng.randbytes(chunk_count * chunk_bits // 8)
    carol, alice = s.generate_keypair(rng), s.generate_keypair(rng)
    key, other = s.generate_key(rng), s.generate_key(rng)
    cert = certify(data, chunk_bits, variant, carol, s)
    subs = []
    commitments = [s.hash(b"junk")]
    for behavior in ("honest", "corrupt_chunk"):
        sellr = Seller(Strategy.seller(behavior, 1), variant, data, chunk_bits, key, other, alice, s)
        payload = sellr.payload()
        commitments.append(commitment_for(payload, s) or s.hash(b"o1"))
        buyr = Buyer(Strategy.buyer(), variant, cert, s, random.Random(seed))
        buyr.payload = payload
        subs += [buyr.genuine_submission(m) for m in range(len(payload))]
        for fab in FABRICATIONS:
            buyr.strategy = Strategy.buyer("false_dispute_fabricated", fab)
            subs.append(buyr.fabricated_submission())
    return FuzzFixture(variant, s, cert, alice.public, key, other, tuple(commitments), tuple(subs))


FUZZ_ACTORS = (SELLER_ID, BUYER_ID, "mallory")
_NEXT_STEP = {
    Phase.CREATED: 0,
    Phase.BUYER_FUNDED: 1,
    Phase.SELLER_FUNDED: 2,
    Phase.COMMITTED: 3,
    Phase.ACKED: 4,
    Phase.KEY_REVEALED: 5,
}


def fuzz_run(fx: FuzzFixture, rng: random.Random, steps: int = 12) -> tuple[Contract, int]:
    """Apply ``steps`` random actions (most of them invalid) to a fresh contract.

    Every action either succeeds or raises ContractError; a rejected action
    must leave the state untouched and the ledger is checked after each
    step.  Returns the contract and the number of accepted actions.
    """
    balances = {a: rng.randrange(0, 4000) for a in FUZZ_ACTORS}
    c = new_contract(fx.variant, fx.scheme, balances=balances,
                     funding_window=rng.choice((5, 50, DEFAULT_FUNDING_WINDOW)),
                     grace_window=rng.choice((5, 50, DEFAULT_GRACE_WINDOW)))
    c.register_certificate(fx.certificate, 0)
    accepted = 0
    for _ in range(steps):
        jump = rng.choice((0, 1, 1, 2, 7, c.funding_window, c.grace_window + 1, -1))
        now = max(0, c.now + jump)
        if rng.random() < 0.6 and c.phase in _NEXT_STEP:
            # mostly follow the protocol so deep phases are reached
            op = _NEXT_STEP[c.phase] if c.has_commit or c.phase is not Phase.SELLER_FUNDED else 3
            actor = SELLER_ID if op in (1, 2, 4) else BUYER_ID
        else:
            op = rng.randrange(8)
            actor = rng.choice(FUZZ_ACTORS)
        before = c.state_bytes()
        try:
            if op == 0:
                root = fx.certificate.root if rng.random() < 0.9 else fx.scheme.hash(b"other")
                c.buyer_intent_and_fund(actor, root, rng.randrange(-2, 3000), rng.randrange(-2, 2000), now)
            elif op == 1:
                pk = fx.seller_public if rng.random() < 0.9 else None
                c.seller_fund(actor, rng.randrange(-2, 3000), now, seller_public=pk)
            elif op == 2:
                c.commit(actor, rng.choice(fx.commitments + (b"short",)), now)
            elif op == 3:
                c.buyer_ack(actor, rng.random() < 0.8, now)
            elif op == 4:
                c.reveal_key(actor, fx.key if rng.random() < 0.7 else fx.other_key, now)
            elif op == 5:
                c.dispute(actor, rng.choice(fx.submissions), now)
            else:
                c.tick(now)
            accepted += 1
        except ContractError:
            if c.state_bytes() != before:
                raise AssertionError("rejected action changed contract state") from None
        c.ledger.check()
    return c, accepted
