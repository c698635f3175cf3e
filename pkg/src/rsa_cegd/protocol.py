"""Party state machines and wire messages for the certified-delivery flow.

Wire flow, with the step tags used in transcripts:

    exchange:  E1 goods offer        seller -> buyer
               E2 encrypted receipt  buyer  -> seller
               E3 key release        seller -> buyer
               E4 receipt release    buyer  -> seller
    recovery:  R1 recovery request   seller -> arbiter
               R2 recovered receipt randomizer   arbiter -> seller
               R3 recovered goods randomizer     arbiter -> buyer

Protocol asymmetries are preserved exactly because the attack scripts in
the harness depend on them:

  * there is no abort handshake; a stopped session just dangles,
  * only the seller side can construct a recovery request,
  * the arbiter is stateless across sessions and applies no freshness
    test to recovery requests,
  * session ids exist only as routing metadata attached by the harness
    and are never covered by any signature,
  * a buyer handling a recovered randomizer tests it against the current
    session only, never against earlier ones.

Handlers raise Reject (with a stable reason code) on verification
failures and return None when a message arrives out of phase, in which
case state does not change.
"""

import random
from dataclasses import dataclass
from enum import Enum

from .credentials import (
    CaIdentity,
    GoodsCertificate,
    RecoverableCert,
    TtpIdentity,
    check_goods_cert,
    hash_goods,
    issue_goods_cert,
    recover_private_exponent,
    verify_recoverable_cert,
)
from .crypto import (
    NotInvertible,
    PublicKey,
    RsaKeyPair,
    int_to_hex,
    mod_pow,
    random_prime_below,
    random_unit,
    sym_decrypt,
    sym_encrypt,
)
from .vres import (
    OriginProof,
    Receipt,
    RecoveryMismatch,
    VresTriple,
    derive_enc_randomizer,
    generate_vres,
    make_auth_token,
    make_origin_proof,
    recover_randomizer,
    recover_receipt,
    unwrap_key,
    verify_auth_token,
    verify_origin_proof,
    verify_receipt,
    verify_vres,
    wrap_key,
)


class Reject(Exception):
    """Incoming message failed verification; reason is a stable code."""

    def __init__(self, reason: str):
        self.reason = reason
        super().__init__(reason)


class SenderPhase(Enum):
    INIT = "init"
    SENT_OFFER = "sent-offer"
    SENT_KEY = "sent-key"
    DONE = "done"
    DANGLING = "dangling"


class ReceiverPhase(Enum):
    INIT = "init"
    SENT_RECEIPT = "sent-receipt"
    DONE = "done"
    DANGLING = "dangling"


@dataclass(frozen=True)
class PartyKeyring:
    party_id: str
    keys: RsaKeyPair


# Message bodies. STEP is the transcript tag; sender, recipient and session
# id travel outside the body, attached by the harness.

@dataclass(frozen=True)
class GoodsOffer:
    STEP = "E1"
    ciphertext: bytes
    cert: GoodsCertificate
    blinded_key: int
    origin_proof: int


@dataclass(frozen=True)
class EncryptedReceipt:
    STEP = "E2"
    vres: VresTriple
    auth_token: int
    recovery_cert: RecoverableCert


@dataclass(frozen=True)
class KeyRelease:
    STEP = "E3"
    randomizer: int


@dataclass(frozen=True)
class ReceiptRelease:
    STEP = "E4"
    randomizer: int


@dataclass(frozen=True)
class RecoveryRequest:
    STEP = "R1"
    recovery_cert: RecoverableCert
    enc_randomizer: int
    auth_token: int
    sender_enc_randomizer: int
    sender_randomizer: int
    # Routing metadata only; tells the arbiter whom to answer. Unsigned.
    counterparty: str


@dataclass(frozen=True)
class RecoveredReceiptKey:
    STEP = "R2"
    randomizer: int


@dataclass(frozen=True)
class RecoveredGoodsKey:
    STEP = "R3"
    randomizer: int


class EvidenceLedger:
    """Per-party evidence holdings; every item is verified on insertion.

    Goods are keyed by their hash; receipts and origin proofs by
    (counterparty, goods hash)."""

    def __init__(self, owner: str):
        self.owner = owner
        self.goods: dict[int, bytes] = {}
        self.receipts: dict[tuple[str, int], Receipt] = {}
        self.origin_proofs: dict[tuple[str, int], OriginProof] = {}

    def record_goods(self, payload: bytes, goods_hash: int) -> None:
        if hash_goods(payload) != goods_hash:
            raise ValueError("payload does not match the claimed goods hash")
        self.goods[goods_hash] = payload

    def record_receipt(self, receipt: Receipt, signer_pub: PublicKey) -> None:
        if not verify_receipt(receipt, signer_pub):
            raise ValueError("receipt does not verify")
        self.receipts[(receipt.signer, receipt.goods_hash)] = receipt

    def record_origin_proof(self, proof: OriginProof, originator_pub: PublicKey) -> None:
        if not verify_origin_proof(proof.value, proof.goods_hash, originator_pub):
            raise ValueError("origin proof does not verify")
        self.origin_proofs[(proof.originator, proof.goods_hash)] = proof

    def snapshot(self) -> dict:
        """JSON-ready view used by fairness evaluation and transcripts."""
        return {
            "goods": [
                {"goods_hash": int_to_hex(h), "payload": payload.hex()}
                for h, payload in sorted(self.goods.items())
            ],
            "receipts": [
                {"signer": r.signer, "goods_hash": int_to_hex(r.goods_hash),
                 "value": int_to_hex(r.value)}
                for _, r in sorted(self.receipts.items())
            ],
            "origin_proofs": [
                {"originator": p.originator, "goods_hash": int_to_hex(p.goods_hash),
                 "value": int_to_hex(p.value)}
                for _, p in sorted(self.origin_proofs.items())
            ],
        }


class SenderSession:
    """Seller side of one exchange session."""

    def __init__(self, keyring: PartyKeyring, counterparty: str, ca: CaIdentity,
                 arbiter_pub: PublicKey, registry: dict[str, PublicKey],
                 ledger: EvidenceLedger, rng: random.Random):
        self.keyring = keyring
        self.counterparty = counterparty
        self.ca = ca
        self.arbiter_pub = arbiter_pub
        self.registry = registry
        self.ledger = ledger
        self.rng = rng
        self.phase = SenderPhase.INIT
        self.goods_hash: int | None = None
        self.randomizer: int | None = None
        self.enc_randomizer: int | None = None
        self.cert: GoodsCertificate | None = None
        # recovery material, retained from a verified E2
        self.recovery_cert: RecoverableCert | None = None
        self.vres: VresTriple | None = None
        self.auth_token: int | None = None

    def start(self, goods: bytes, description: bytes) -> GoodsOffer | None:
        if self.phase is not SenderPhase.INIT:
            return None
        keys = self.keyring.keys
        key = random_unit(self.rng, keys.n)
        randomizer = random_prime_below(self.rng, keys.n, coprime_to=(keys.n,))
        cert = issue_goods_cert(self.ca, goods, description, key, keys.public)
        wrapped = wrap_key(key, randomizer, keys)
        self.goods_hash = cert.goods_hash
        self.randomizer = randomizer
        self.enc_randomizer = wrapped.enc_randomizer
        self.cert = cert
        self.phase = SenderPhase.SENT_OFFER
        return GoodsOffer(
            ciphertext=sym_encrypt(key, goods),
            cert=cert,
            blinded_key=wrapped.blinded_key,
            origin_proof=make_origin_proof(keys, cert.goods_hash),
        )

    def on_encrypted_receipt(self, msg: EncryptedReceipt,
                             abort: bool = False) -> KeyRelease | None:
        """Verify the E2 material; emit E3, or with abort=True keep the
        verified recovery material and go quiet (the adversarial option —
        nothing on the wire distinguishes it from a lost message)."""
        if self.phase is not SenderPhase.SENT_OFFER:
            return None
        counter_pub = self.registry[self.counterparty]
        if not verify_recoverable_cert(msg.recovery_cert, self.arbiter_pub):
            self.phase = SenderPhase.DANGLING
            raise Reject("bad-recovery-cert")
        if msg.recovery_cert.pub.e != counter_pub.e:
            self.phase = SenderPhase.DANGLING
            raise Reject("exponent-mismatch")
        if not verify_auth_token(msg.auth_token, counter_pub, msg.recovery_cert,
                                 msg.vres.enc_randomizer, self.enc_randomizer,
                                 self.keyring.party_id):
            self.phase = SenderPhase.DANGLING
            raise Reject("bad-token")
        if not verify_vres(msg.vres, self.goods_hash, counter_pub,
                           msg.recovery_cert.pub):
            self.phase = SenderPhase.DANGLING
            raise Reject("bad-vres")
        self.recovery_cert = msg.recovery_cert
        self.vres = msg.vres
        self.auth_token = msg.auth_token
        if abort:
            self.phase = SenderPhase.DANGLING
            return None
        self.phase = SenderPhase.SENT_KEY
        return KeyRelease(self.randomizer)

    def _accept_receipt_randomizer(self, randomizer: int) -> None:
        counter_pub = self.registry[self.counterparty]
        combined = counter_pub.n * self.recovery_cert.pub.n
        if mod_pow(randomizer, counter_pub.e, combined) != self.vres.enc_randomizer:
            self.phase = SenderPhase.DANGLING
            raise Reject("bad-rb")
        try:
            receipt = recover_receipt(self.vres.blinded_receipt, randomizer,
                                      counter_pub, self.goods_hash,
                                      self.counterparty)
        except (RecoveryMismatch, NotInvertible):
            self.phase = SenderPhase.DANGLING
            raise Reject("bad-rb")
        self.ledger.record_receipt(receipt, counter_pub)
        self.phase = SenderPhase.DONE

    def on_receipt_release(self, msg: ReceiptRelease) -> None:
        if self.phase is not SenderPhase.SENT_KEY:
            return None
        self._accept_receipt_randomizer(msg.randomizer)

    def on_recovered_randomizer(self, msg: RecoveredReceiptKey) -> None:
        """Arbiter answered a recovery request; unblind the stored triple."""
        if self.phase not in (SenderPhase.SENT_KEY, SenderPhase.DANGLING):
            return None
        if self.vres is None:
            return None
        self._accept_receipt_randomizer(msg.randomizer)

    def recovery_request(self) -> RecoveryRequest:
        """Package the retained E2 material for the arbiter. Only sender
        sessions have this; the receiver role cannot trigger recovery."""
        if self.recovery_cert is None:
            raise ValueError("no recovery material retained for this session")
        return RecoveryRequest(
            recovery_cert=self.recovery_cert,
            enc_randomizer=self.vres.enc_randomizer,
            auth_token=self.auth_token,
            sender_enc_randomizer=self.enc_randomizer,
            sender_randomizer=self.randomizer,
            counterparty=self.counterparty,
        )


class ReceiverSession:
    """Buyer side of one exchange session."""

    def __init__(self, keyring: PartyKeyring, counterparty: str, ca_pub: PublicKey,
                 arbiter_pub: PublicKey, registry: dict[str, PublicKey],
                 recovery_cert: RecoverableCert, recovery_keys: RsaKeyPair,
                 ledger: EvidenceLedger, rng: random.Random):
        self.keyring = keyring
        self.counterparty = counterparty
        self.ca_pub = ca_pub
        self.arbiter_pub = arbiter_pub
        self.registry = registry
        self.recovery_cert = recovery_cert
        self.recovery_keys = recovery_keys
        self.ledger = ledger
        self.rng = rng
        self.phase = ReceiverPhase.INIT
        self.ciphertext: bytes | None = None
        self.cert: GoodsCertificate | None = None
        self.blinded_key: int | None = None
        self.origin_value: int | None = None
        self.randomizer: int | None = None

    def on_goods_offer(self, msg: GoodsOffer) -> EncryptedReceipt | None:
        if self.phase is not ReceiverPhase.INIT:
            return None
        sender_pub = self.registry[self.counterparty]
        problem = check_goods_cert(msg.cert, msg.ciphertext, self.ca_pub)
        if problem is not None:
            self.phase = ReceiverPhase.DANGLING
            raise Reject(problem)
        if not verify_origin_proof(msg.origin_proof, msg.cert.goods_hash, sender_pub):
            self.phase = ReceiverPhase.DANGLING
            raise Reject("eoo-mismatch")
        try:
            sender_enc_randomizer = derive_enc_randomizer(
                msg.blinded_key, msg.cert.enc_key, sender_pub)
        except NotInvertible:
            self.phase = ReceiverPhase.DANGLING
            raise Reject("bad-enc-key")
        keys = self.keyring.keys
        bound = min(keys.n, self.recovery_keys.n)
        randomizer = random_prime_below(self.rng, bound,
                                        coprime_to=(keys.n, self.recovery_keys.n))
        triple = generate_vres(msg.cert.goods_hash, keys, self.recovery_keys,
                               randomizer)
        token = make_auth_token(keys, self.recovery_cert, triple.enc_randomizer,
                                sender_enc_randomizer, self.counterparty)
        self.ciphertext = msg.ciphertext
        self.cert = msg.cert
        self.blinded_key = msg.blinded_key
        self.origin_value = msg.origin_proof
        self.randomizer = randomizer
        self.phase = ReceiverPhase.SENT_RECEIPT
        return EncryptedReceipt(triple, token, self.recovery_cert)

    def _unlock_goods(self, randomizer: int) -> bytes:
        """Shared E3/R3 handling: unwrap the key, check it against the
        certified encrypted key, decrypt and check the goods hash. Only on
        full success do goods and origin proof enter the ledger."""
        sender_pub = self.registry[self.counterparty]
        try:
            key = unwrap_key(self.blinded_key, randomizer, sender_pub.n)
        except NotInvertible:
            raise Reject("bad-key")
        if mod_pow(key, sender_pub.e, sender_pub.n) != self.cert.enc_key:
            raise Reject("bad-key")
        payload = sym_decrypt(key, self.ciphertext)
        if hash_goods(payload) != self.cert.goods_hash:
            raise Reject("bad-key")
        self.ledger.record_goods(payload, self.cert.goods_hash)
        self.ledger.record_origin_proof(
            OriginProof(self.origin_value, self.cert.goods_hash, self.counterparty),
            sender_pub)
        return payload

    def on_key_release(self, msg: KeyRelease) -> ReceiptRelease | None:
        if self.phase is not ReceiverPhase.SENT_RECEIPT:
            return None
        try:
            self._unlock_goods(msg.randomizer)
        except Reject:
            self.phase = ReceiverPhase.DANGLING
            raise
        self.phase = ReceiverPhase.DONE
        return ReceiptRelease(self.randomizer)

    def on_recovered_randomizer(self, msg: RecoveredGoodsKey) -> None:
        """Arbiter-delivered randomizer. Tested against the current session
        only; this side never replays it against older sessions' stored
        offers, and has no way to ask the arbiter anything itself."""
        if self.phase is not ReceiverPhase.SENT_RECEIPT:
            return None
        try:
            self._unlock_goods(msg.randomizer)
        except Reject:
            self.phase = ReceiverPhase.DANGLING
            raise
        self.phase = ReceiverPhase.DONE
        return None


class ArbiterService:
    """Recovery arbiter. Deliberately stateless across sessions: every
    request is judged on internal consistency alone, so a tuple retained
    from one run passes identically when presented during another."""

    def __init__(self, identity: TtpIdentity, registry: dict[str, PublicKey]):
        self.identity = identity
        self.registry = registry

    def on_recovery_request(self, msg: RecoveryRequest, requester: str
                            ) -> tuple[RecoveredReceiptKey, RecoveredGoodsKey]:
        if not verify_recoverable_cert(msg.recovery_cert, self.identity.keys.public):
            raise Reject("bad-recovery-cert")
        counter_pub = self.registry.get(msg.counterparty)
        if counter_pub is None:
            raise Reject("unknown-counterparty")
        if msg.recovery_cert.pub.e != counter_pub.e:
            raise Reject("exponent-mismatch")
        if not verify_auth_token(msg.auth_token, counter_pub, msg.recovery_cert,
                                 msg.enc_randomizer, msg.sender_enc_randomizer,
                                 requester):
            raise Reject("bad-token")
        requester_pub = self.registry.get(requester)
        if requester_pub is None:
            raise Reject("unknown-requester")
        if mod_pow(msg.sender_randomizer, requester_pub.e,
                   requester_pub.n) != msg.sender_enc_randomizer:
            raise Reject("bad-sender-randomizer")
        recovery_exp = recover_private_exponent(self.identity, msg.recovery_cert)
        randomizer = recover_randomizer(msg.enc_randomizer, recovery_exp,
                                        msg.recovery_cert.pub.n)
        # Both answers or neither: the receipt key to the requester, the
        # goods key to the counterparty.
        return RecoveredReceiptKey(randomizer), RecoveredGoodsKey(msg.sender_randomizer)
