"""Simulated arbiter contract: escrow, timeouts, dispute adjudication, settlement.

Everything a :class:`Contract` accepts is "on-chain": it is appended to the
action log with its exact serialized bytes, and the hashing, decryption,
signature checks and Merkle folds the contract performs are counted.
"""

from __future__ import annotations

import json
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .chunks import Certificate, Variant
from .crypto import DEFAULT_SCHEME, Scheme, SymmetricKey
from .merkle import MerkleProof, verify as merkle_verify

__all__ = [
    "Phase",
    "Party",
    "ContractError",
    "LedgerInvariantError",
    "Ledger",
    "Verdict",
    "DisputeSubmission",
    "ActionRecord",
    "CostReport",
    "Contract",
    "ONContract",
    "OLogNContract",
    "O1Contract",
    "new_contract",
    "register_certificate",
    "replay",
    "read_transcript",
    "DEFAULT_FUNDING_WINDOW",
    "DEFAULT_GRACE_WINDOW",
]

DEFAULT_FUNDING_WINDOW = 86_400
DEFAULT_GRACE_WINDOW = 172_800

OP_NAMES = ("hashes", "decrypt_bits", "sig_verifies", "merkle_folds")


class Phase(str, Enum):
    CREATED = "Created"
    BUYER_FUNDED = "BuyerFunded"
    SELLER_FUNDED = "SellerFunded"
    COMMITTED = "Committed"
    ACKED = "Acked"
    KEY_REVEALED = "KeyRevealed"
    SETTLED = "Settled"
    REFUNDED = "Refunded"
    DISPUTE_RESOLVED = "DisputeResolved"

    @property
    def terminal(self) -> bool:
        return self in (Phase.SETTLED, Phase.REFUNDED, Phase.DISPUTE_RESOLVED)


PRE_REVEAL = (Phase.BUYER_FUNDED, Phase.SELLER_FUNDED, Phase.COMMITTED, Phase.ACKED)


class Party(str, Enum):
    SELLER = "seller"
    BUYER = "buyer"


class ContractError(Exception):
    """An action the contract rejects; state is left untouched."""


class LedgerInvariantError(RuntimeError):
    pass


@dataclass
class Escrow:
    owner: str
    amount: int
    refundable_at: int


class Ledger:
    """Party balances plus the three escrow slots the contract controls."""

    SLOTS = ("target", "deposit_a", "deposit_b")

    def __init__(self, balances: dict[str, int]):
        if any(v < 0 for v in balances.values()):
            raise ValueError("balances must be non-negative")
        self.balances = dict(balances)
        self.escrow: dict[str, Escrow] = {}
        self._total = self.total()

    def total(self) -> int:
        return sum(self.balances.values()) + sum(e.amount for e in self.escrow.values())

    def can_pay(self, owner: str, amount: int) -> bool:
        return self.balances.get(owner, 0) >= amount

    def lock(self, slot: str, owner: str, amount: int, refundable_at: int) -> None:
        if slot in self.escrow:
            raise ContractError(f"escrow slot {slot} already funded")
        if amount < 0:
            raise ContractError("negative amount")
        if not self.can_pay(owner, amount):
            raise ContractError(f"{owner} cannot cover {amount}")
        self.balances[owner] -= amount
        self.escrow[slot] = Escrow(owner, amount, refundable_at)

    def release(self, slot: str, to: str) -> None:
        e = self.escrow.pop(slot, None)
        if e is not None:
            self.balances[to] = self.balances.get(to, 0) + e.amount

    def refund_all(self) -> None:
        for slot in list(self.escrow):
            self.release(slot, self.escrow[slot].owner)

    def check(self) -> None:
        if self.total() != self._total:
            raise LedgerInvariantError(f"coins not conserved: {self.total()} != {self._total}")
        if any(v < 0 for v in self.balances.values()):
            raise LedgerInvariantError("negative balance")
        if any(e.amount < 0 for e in self.escrow.values()):
            raise LedgerInvariantError("negative escrow")

    def snapshot(self) -> dict:
        return {
            "balances": dict(sorted(self.balances.items())),
            "escrow": {k: [e.owner, e.amount, e.refundable_at] for k, e in sorted(self.escrow.items())},
        }


@dataclass(frozen=True)
class Verdict:
    dishonest: Party
    reason: str
    evidence: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {"dishonest": self.dishonest.value, "reason": self.reason, "evidence": self.evidence}


@dataclass(frozen=True)
class DisputeSubmission:
    """Evidence a buyer uploads.

    O(N) uses ``ciphertext`` only; O(log N) adds ``claimed_hash`` and
    ``proof``; O(1) adds ``claimed_hash``, ``signature`` and the chunk
    ``index``.
    """

    variant: Variant
    ciphertext: bytes
    claimed_hash: bytes = b""
    proof: Optional[MerkleProof] = None
    signature: bytes = b""
    index: int = 0

    @property
    def chunk_index(self) -> int:
        if self.variant is Variant.OLOGN and self.proof is not None:
            return self.proof.leaf_index
        return self.index

    def to_bytes(self, scheme: Scheme = DEFAULT_SCHEME) -> bytes:
        ct = len(self.ciphertext).to_bytes(4, "big") + self.ciphertext
        head = bytes([self.variant.code])
        if self.variant is Variant.ON:
            return head + ct
        if len(self.claimed_hash) != scheme.digest_bytes:
            raise ValueError("claimed hash has the wrong width")
        if self.variant is Variant.OLOGN:
            if self.proof is None:
                raise ValueError("O(log N) submission needs a Merkle proof")
            if any(len(d) != scheme.digest_bytes or s not in (0, 1) for d, s in self.proof.siblings):
                raise ValueError("malformed Merkle proof")
            return head + self.proof.to_bytes() + self.claimed_hash + ct
        if len(self.signature) != scheme.sig_bytes:
            raise ValueError("signature has the wrong width")
        return head + self.index.to_bytes(4, "big") + self.claimed_hash + ct + self.signature

    @classmethod
    def from_bytes(cls, data: bytes, scheme: Scheme = DEFAULT_SCHEME) -> "DisputeSubmission":
        if not data:
            raise ValueError("empty submission")
        variant = Variant.from_code(data[0])
        rest = data[1:]
        proof = None
        index = 0
        if variant is Variant.OLOGN:
            proof, rest = MerkleProof.parse_prefix(rest, scheme.digest_bytes)
        elif variant is Variant.O1:
            index = int.from_bytes(rest[:4], "big")
            rest = rest[4:]
        h = 0 if variant is Variant.ON else scheme.digest_bytes
        claimed, rest = rest[:h], rest[h:]
        if len(rest) < 4:
            raise ValueError("submission truncated")
        n = int.from_bytes(rest[:4], "big")
        ct, rest = rest[4 : 4 + n], rest[4 + n :]
        sig = b""
        if variant is Variant.O1:
            sig, rest = rest[: scheme.sig_bytes], rest[scheme.sig_bytes :]
        if len(ct) != n or rest or len(claimed) != h or (variant is Variant.O1 and len(sig) != scheme.sig_bytes):
            raise ValueError("submission length mismatch")
        return cls(variant, bytes(ct), bytes(claimed), proof, bytes(sig), index)


@dataclass(frozen=True)
class ActionRecord:
    tick: int
    actor: str
    action: str
    payload: bytes
    ops: dict

    def to_json(self) -> str:
        return json.dumps(
            {
                "record": "action",
                "tick": self.tick,
                "actor": self.actor,
                "action": self.action,
                "bytes": len(self.payload),
                "payload": self.payload.hex(),
                "ops": self.ops,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "ActionRecord":
        d = json.loads(line)
        return cls(d["tick"], d["actor"], d["action"], bytes.fromhex(d["payload"]), d["ops"])


@dataclass
class CostReport:
    onchain_bytes: int
    dispute_bytes: int
    bytes_by_action: dict
    ops: dict
    dispute_ops: dict

    @property
    def onchain_bits(self) -> int:
        return 8 * self.onchain_bytes

    @property
    def happy_bytes(self) -> int:
        return self.onchain_bytes - self.dispute_bytes

    def to_dict(self) -> dict:
        return {
            "onchain_bytes": self.onchain_bytes,
            "dispute_bytes": self.dispute_bytes,
            "bytes_by_action": self.bytes_by_action,
            "ops": self.ops,
            "dispute_ops": self.dispute_ops,
        }


def _amount(x: int) -> bytes:
    return x.to_bytes(8, "big")


def _ops_dict(c: Counter) -> dict:
    return {k: c.get(k, 0) for k in OP_NAMES}


class Contract:
    """Base state machine shared by the three protocol variants."""

    variant: Variant
    has_commit = True

    def __init__(
        self,
        scheme: Scheme = DEFAULT_SCHEME,
        balances: Optional[dict[str, int]] = None,
        funding_window: int = DEFAULT_FUNDING_WINDOW,
        grace_window: int = DEFAULT_GRACE_WINDOW,
    ):
        if funding_window <= 0 or grace_window <= 0:
            raise ValueError("windows must be positive")
        self.scheme = scheme
        self.initial_balances = dict(balances or {})
        self.ledger = Ledger(self.initial_balances)
        self.funding_window = funding_window
        self.grace_window = grace_window
        self.phase = Phase.CREATED
        self.certificate: Optional[Certificate] = None
        self.committed: Optional[bytes] = None
        self.revealed_key: Optional[SymmetricKey] = None
        self.seller: Optional[str] = None
        self.buyer: Optional[str] = None
        self.seller_public: Optional[bytes] = None
        self.funding_deadline: Optional[int] = None
        self.grace_deadline: Optional[int] = None
        self.verdict: Optional[Verdict] = None
        self.now = 0
        self.log: list[ActionRecord] = []
        self._ops: Counter = Counter()

    # instrumented primitives --------------------------------------------

    def _hash(self, data: bytes) -> bytes:
        self._ops["hashes"] += 1
        return self.scheme.hash(data)

    def _decrypt(self, key: SymmetricKey, index: int, ct: bytes) -> bytes:
        self._ops["decrypt_bits"] += 8 * len(ct)
        return self.scheme.decrypt(key, index, ct)

    def _verify_sig(self, public: bytes, message: bytes, sig: bytes) -> bool:
        self._ops["sig_verifies"] += 1
        return self.scheme.verify(public, message, sig)

    def _merkle_hash(self, data: bytes) -> bytes:
        if data[:1] == b"\x01":
            self._ops["merkle_folds"] += 1
        return self._hash(data)

    # plumbing --------------------------------------------------------------

    @contextmanager
    def _action(self, name: str, actor: str, now: int):
        if now < self.now:
            raise ContractError(f"clock went backwards: {now} < {self.now}")
        before = self._ops.copy()
        box = {"payload": b""}
        try:
            yield box
        except BaseException:
            self._ops = before
            raise
        delta = self._ops.copy()
        delta.subtract(before)
        self.log.append(ActionRecord(now, actor, name, box["payload"], _ops_dict(delta)))
        self.now = now
        self.ledger.check()

    def _require(self, cond: bool, msg: str) -> None:
        if not cond:
            raise ContractError(msg)

    def _require_phase(self, *phases: Phase) -> None:
        self._require(self.phase in phases, f"action not allowed in phase {self.phase.value}")

    def _require_before_funding_deadline(self, now: int) -> None:
        self._require(now <= self.funding_deadline, "funding window has expired")

    # trading phase ---------------------------------------------------------

    def register_certificate(self, certificate: Certificate, now: int = 0) -> "Contract":
        """Post the certifier's root and signature; rejected if the signature fails."""
        self._require(self.certificate is None, "certificate already registered")
        pk = certificate.carol_public
        self._require(0 < len(pk) < 256, "malformed certifier key")
        with self._action("register_certificate", "carol", now) as box:
            self._require(len(certificate.root) == self.scheme.digest_bytes, "root has the wrong width")
            self._require(
                self._verify_sig(pk, certificate.root, certificate.carol_signature),
                "certificate signature does not verify",
            )
            self.certificate = certificate
            box["payload"] = (
                bytes([len(pk)])
                + pk
                + certificate.root
                + certificate.carol_signature
                + certificate.chunk_bits.to_bytes(4, "big")
                + certificate.chunk_count.to_bytes(4, "big")
                + _amount(certificate.original_len)
            )
        return self

    def buyer_intent_and_fund(self, buyer: str, target_root: bytes, price: int, deposit_b: int, now: int) -> None:
        self._require(self.certificate is not None, "no certificate registered")
        self._require_phase(Phase.CREATED)
        self._require(target_root == self.certificate.root, "target root does not match the certificate")
        self._require(price > 0 and deposit_b >= 0, "price must be positive, deposit non-negative")
        self._require(self.ledger.can_pay(buyer, price + deposit_b), f"{buyer} cannot cover price and deposit")
        with self._action("buyer_intent_and_fund", buyer, now) as box:
            deadline = now + self.funding_window
            self.ledger.lock("target", buyer, price, deadline)
            self.ledger.lock("deposit_b", buyer, deposit_b, deadline)
            self.buyer = buyer
            self.funding_deadline = deadline
            self.phase = Phase.BUYER_FUNDED
            box["payload"] = target_root + _amount(price) + _amount(deposit_b)

    def seller_fund(self, seller: str, deposit_a: int, now: int, seller_public: Optional[bytes] = None) -> None:
        self._require_phase(Phase.BUYER_FUNDED)
        self._require_before_funding_deadline(now)
        self._require(seller != self.buyer, "seller and buyer must differ")
        self._require(deposit_a > 0, "seller deposit must be positive")
        self._require(self.ledger.can_pay(seller, deposit_a), f"{seller} cannot cover deposit")
        if self.variant is Variant.O1:
            self._require(bool(seller_public) and len(seller_public) < 256, "O(1) contract needs the seller key")
        with self._action("seller_fund", seller, now) as box:
            self.ledger.lock("deposit_a", seller, deposit_a, self.funding_deadline)
            self.seller = seller
            payload = _amount(deposit_a)
            if self.variant is Variant.O1:
                self.seller_public = seller_public
                payload += bytes([len(seller_public)]) + seller_public
            self.phase = Phase.SELLER_FUNDED
            box["payload"] = payload

    def commit(self, seller: str, committed_value: bytes, now: int) -> None:
        self._require(self.has_commit, "this variant has no commitment step")
        self._require_phase(Phase.SELLER_FUNDED)
        self._require(seller == self.seller, "only the seller may commit")
        self._require_before_funding_deadline(now)
        self._require(len(committed_value) == self.scheme.digest_bytes, "commitment has the wrong width")
        with self._action("commit", seller, now) as box:
            self.committed = committed_value
            self.phase = Phase.COMMITTED
            box["payload"] = committed_value

    def buyer_ack(self, buyer: str, yes: bool, now: int) -> None:
        self._require_phase(Phase.COMMITTED if self.has_commit else Phase.SELLER_FUNDED)
        self._require(buyer == self.buyer, "only the buyer may acknowledge")
        self._require_before_funding_deadline(now)
        with self._action("buyer_ack", buyer, now) as box:
            if yes:
                self.phase = Phase.ACKED
            else:
                self.ledger.refund_all()
                self.phase = Phase.REFUNDED
            box["payload"] = b"\x01" if yes else b"\x00"

    def reveal_key(self, seller: str, key: SymmetricKey, now: int) -> None:
        self._require_phase(Phase.ACKED)
        self._require(seller == self.seller, "only the seller may reveal the key")
        self._require_before_funding_deadline(now)
        with self._action("reveal_key", seller, now) as box:
            self.revealed_key = key
            self.grace_deadline = now + self.grace_window
            self.phase = Phase.KEY_REVEALED
            box["payload"] = key.secret

    # disputation phase -------------------------------------------------------

    def dispute(self, buyer: str, submission: DisputeSubmission, now: int) -> Verdict:
        self._require(self.verdict is None, "a dispute was already adjudicated")
        self._require_phase(Phase.KEY_REVEALED)
        self._require(buyer == self.buyer, "only the buyer may dispute")
        self._require(now <= self.grace_deadline, "grace period has expired")
        self._require(submission.variant is self.variant, "submission is for another variant")
        try:
            raw = submission.to_bytes(self.scheme)
        except ValueError as exc:
            raise ContractError(f"malformed submission: {exc}") from None
        with self._action("dispute", buyer, now) as box:
            verdict = self._adjudicate(submission)
            winner = Party.BUYER if verdict.dishonest is Party.SELLER else Party.SELLER
            to = self.buyer if winner is Party.BUYER else self.seller
            for slot in Ledger.SLOTS:
                self.ledger.release(slot, to)
            self.verdict = verdict
            self.phase = Phase.DISPUTE_RESOLVED
            box["payload"] = raw
        return verdict

    def _adjudicate(self, sub: DisputeSubmission) -> Verdict:
        raise NotImplementedError

    def _decrypt_or_none(self, index: int, ct: bytes) -> Optional[bytes]:
        try:
            return self._decrypt(self.revealed_key, index, ct)
        except ValueError:
            return None

    # clock -------------------------------------------------------------------

    def tick(self, now: int) -> Optional[Phase]:
        """Apply whichever timeout has passed at ``now``; return the new phase if any."""
        if now < self.now:
            raise ContractError(f"clock went backwards: {now} < {self.now}")
        if self.phase in PRE_REVEAL and now > self.funding_deadline:
            with self._action("timeout_refund", "clock", now):
                self.ledger.refund_all()
                self.phase = Phase.REFUNDED
            return self.phase
        if self.phase is Phase.KEY_REVEALED and now > self.grace_deadline:
            with self._action("settle", "clock", now):
                self.ledger.release("target", self.seller)
                self.ledger.release("deposit_a", self.seller)
                self.ledger.release("deposit_b", self.buyer)
                self.phase = Phase.SETTLED
            return self.phase
        return None

    # reporting ---------------------------------------------------------------

    def onchain_footprint(self) -> CostReport:
        by_action: dict[str, int] = {}
        dispute_ops: dict = _ops_dict(Counter())
        dispute_bytes = 0
        for r in self.log:
            by_action[r.action] = by_action.get(r.action, 0) + len(r.payload)
            if r.action == "dispute":
                dispute_bytes += len(r.payload)
                dispute_ops = dict(r.ops)
        return CostReport(
            onchain_bytes=sum(len(r.payload) for r in self.log),
            dispute_bytes=dispute_bytes,
            bytes_by_action=by_action,
            ops=_ops_dict(self._ops),
            dispute_ops=dispute_ops,
        )

    def state(self) -> dict:
        return {
            "variant": self.variant.value,
            "phase": self.phase.value,
            "certificate_root": self.certificate.root.hex() if self.certificate else None,
            "committed": self.committed.hex() if self.committed else None,
            "revealed_key": self.revealed_key.secret.hex() if self.revealed_key else None,
            "seller": self.seller,
            "buyer": self.buyer,
            "seller_public": self.seller_public.hex() if self.seller_public else None,
            "funding_deadline": self.funding_deadline,
            "grace_deadline": self.grace_deadline,
            "verdict": self.verdict.to_dict() if self.verdict else None,
            "now": self.now,
            "ledger": self.ledger.snapshot(),
            "ops": _ops_dict(self._ops),
        }

    def state_bytes(self) -> bytes:
        return json.dumps(self.state(), sort_keys=True).encode()

    def header(self) -> dict:
        return {
            "record": "header",
            "variant": self.variant.value,
            "scheme": self.scheme.descriptor(),
            "funding_window": self.funding_window,
            "grace_window": self.grace_window,
            "balances": dict(sorted(self.initial_balances.items())),
        }

    def transcript_lines(self) -> list[str]:
        return [json.dumps(self.header(), sort_keys=True)] + [r.to_json() for r in self.log]

    def write_transcript(self, path: str | Path) -> None:
        Path(path).write_text("\n".join(self.transcript_lines()) + "\n")

    # replay ------------------------------------------------------------------

    def apply(self, record: ActionRecord) -> None:
        """Re-execute one logged action against this contract."""
        p, t, actor = record.payload, record.tick, record.actor
        d = self.scheme.digest_bytes
        if record.action == "register_certificate":
            n = p[0]
            pk, rest = p[1 : 1 + n], p[1 + n :]
            root, rest = rest[:d], rest[d:]
            sig, rest = rest[: self.scheme.sig_bytes], rest[self.scheme.sig_bytes :]
            cert = Certificate(
                root, sig, pk, int.from_bytes(rest[:4], "big"), int.from_bytes(rest[4:8], "big"), int.from_bytes(rest[8:16], "big")
            )
            self.register_certificate(cert, now=t)
        elif record.action == "buyer_intent_and_fund":
            self.buyer_intent_and_fund(actor, p[:d], int.from_bytes(p[d : d + 8], "big"), int.from_bytes(p[d + 8 : d + 16], "big"), t)
        elif record.action == "seller_fund":
            pk = p[9 : 9 + p[8]] if len(p) > 8 else None
            self.seller_fund(actor, int.from_bytes(p[:8], "big"), t, seller_public=pk)
        elif record.action == "commit":
            self.commit(actor, p, t)
        elif record.action == "buyer_ack":
            self.buyer_ack(actor, p == b"\x01", t)
        elif record.action == "reveal_key":
            self.reveal_key(actor, SymmetricKey(p), t)
        elif record.action == "dispute":
            self.dispute(actor, DisputeSubmission.from_bytes(p, self.scheme), t)
        elif record.action in ("timeout_refund", "settle"):
            self.tick(t)
        else:
            raise ValueError(f"unknown action {record.action!r}")


class ONContract(Contract):
    """Whole-ciphertext dispute: the buyer uploads everything received."""

    variant = Variant.ON

    def _adjudicate(self, sub: DisputeSubmission) -> Verdict:
        submitted = self._hash(sub.ciphertext)
        ev = {"submitted_hash": submitted.hex(), "committed": self.committed.hex()}
        if submitted != self.committed:
            return Verdict(Party.BUYER, "ciphertext-not-committed", ev)
        plain = self._decrypt_or_none(0, sub.ciphertext)
        if plain is None:
            return Verdict(Party.SELLER, "undecryptable", ev)
        decrypted = self._hash(plain)
        ev["decrypted_hash"] = decrypted.hex()
        if decrypted == self.certificate.root:
            return Verdict(Party.BUYER, "data-matches-certificate", ev)
        return Verdict(Party.SELLER, "data-mismatch", ev)


class OLogNContract(Contract):
    """Merkle-proof dispute over the committed (hash, ciphertext) leaves."""

    variant = Variant.OLOGN

    def _adjudicate(self, sub: DisputeSubmission) -> Verdict:
        leaf = sub.claimed_hash + sub.ciphertext
        ev = {"claimed_hash": sub.claimed_hash.hex(), "leaf_index": sub.proof.leaf_index}
        if not merkle_verify(self.committed, leaf, sub.proof, self._merkle_hash, self.certificate.chunk_count):
            return Verdict(Party.BUYER, "merkle-proof-invalid", ev)
        plain = self._decrypt_or_none(sub.proof.leaf_index, sub.ciphertext)
        if plain is None:
            return Verdict(Party.SELLER, "undecryptable", ev)
        decrypted = self._hash(plain)
        ev["decrypted_hash"] = decrypted.hex()
        if decrypted == sub.claimed_hash:
            return Verdict(Party.BUYER, "chunk-consistent", ev)
        return Verdict(Party.SELLER, "chunk-mismatch", ev)


class O1Contract(Contract):
    """Constant-size dispute backed by the seller's per-chunk signature."""

    variant = Variant.O1
    has_commit = False

    def _adjudicate(self, sub: DisputeSubmission) -> Verdict:
        message = self._hash(sub.index.to_bytes(4, "big") + sub.claimed_hash + sub.ciphertext)
        ev = {"claimed_hash": sub.claimed_hash.hex(), "chunk_index": sub.index, "message": message.hex()}
        if not self._verify_sig(self.seller_public, message, sub.signature):
            return Verdict(Party.BUYER, "signature-invalid", ev)
        plain = self._decrypt_or_none(sub.index, sub.ciphertext)
        if plain is None:
            return Verdict(Party.SELLER, "undecryptable", ev)
        decrypted = self._hash(plain)
        ev["decrypted_hash"] = decrypted.hex()
        if decrypted == sub.claimed_hash:
            return Verdict(Party.BUYER, "chunk-consistent", ev)
        return Verdict(Party.SELLER, "chunk-mismatch", ev)


_CLASSES = {Variant.ON: ONContract, Variant.OLOGN: OLogNContract, Variant.O1: O1Contract}


def new_contract(variant: Variant, scheme: Scheme = DEFAULT_SCHEME, **kwargs) -> Contract:
    return _CLASSES[Variant(variant)](scheme, **kwargs)


def register_certificate(
    variant: Variant, certificate: Certificate, scheme: Scheme = DEFAULT_SCHEME, now: int = 0, **kwargs
) -> Contract:
    """Deploy a contract for ``variant`` and post ``certificate`` to it."""
    return new_contract(variant, scheme, **kwargs).register_certificate(certificate, now)


def read_transcript(lines: Iterable[str]) -> tuple[dict, list[ActionRecord]]:
    header = None
    records = []
    for line in lines:
        line = line.strip()
        if not line:
            continue
        d = json.loads(line)
        if d.get("record") == "header":
            header = d
        elif d.get("record") == "action":
            records.append(ActionRecord.from_json(line))
    if header is None:
        raise ValueError("transcript has no header")
    return header, records


def replay(lines: Iterable[str]) -> Contract:
    """Rebuild a contract by re-executing every action in a transcript."""
    header, records = read_transcript(lines)
    contract = new_contract(
        Variant(header["variant"]),
        Scheme.from_descriptor(header["scheme"]),
        balances=header["balances"],
        funding_window=header["funding_window"],
        grace_window=header["grace_window"],
    )
    for r in records:
        contract.apply(r)
    return contract
