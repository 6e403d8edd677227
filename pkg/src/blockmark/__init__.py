"""Fair exchange of certified data through a simulated arbiter contract.

Three protocol variants trade off dispute size: the whole ciphertext
(``Variant.ON``), a Merkle proof over per-chunk leaves (``Variant.OLOGN``),
or one seller-signed chunk (``Variant.O1``).
"""

from .chunks import (
    Certificate,
    ChunkedData,
    OffchainPayload,
    PayloadElement,
    Variant,
    certify,
    dispute_payload_bits,
    join,
    make_payload,
    optimal_chunk_bits,
    split,
)
from .contract import (
    Contract,
    ContractError,
    CostReport,
    DisputeSubmission,
    Ledger,
    Party,
    Phase,
    Verdict,
    new_contract,
    register_certificate,
    replay,
)
from .crypto import DEFAULT_SCHEME, TOY_SCHEME, KeyPair, Scheme, SymmetricKey
from .merkle import MerkleProof, MerkleTree
from .sim import Scenario, Strategy, TradeOutcome, oracle_adjudicate, run, strategy_matrix, sweep

__version__ = "0.1.0"
