"""Transcript records and the JSON-lines report file format.

A report file is one JSON object per line, in order:

  1. exactly one header record,
  2. message and milestone records, chronologically,
  3. one evidence record per party, parties sorted,
  4. exactly one verdict record.

Record shapes (all big integers in canonical lowercase hex, all byte
strings in plain hex):

  header    {"type":"header","format":1,"mode":...,"bits":...,
             "exponent":hex,"seed":int,"goods_size":int,
             "parties":[id,...],"registry":{id:{"e":hex,"n":hex},...},
             "ca":{"id":...,"e":hex,"n":hex},
             "arbiter":{"id":...,"e":hex,"n":hex}}
  message   {"type":"message","step":"E1".."R3","session":int,
             "sender":id,"recipient":id,"fields":{...}}
  milestone {"type":"milestone","session":int,"label":...}
  evidence  {"type":"evidence","party":id,
             "goods":[{"goods_hash":hex,"payload":hex},...],
             "receipts":[{"signer":id,"goods_hash":hex,"value":hex},...],
             "origin_proofs":[{"originator":id,"goods_hash":hex,
                               "value":hex},...]}
  verdict   {"type":"verdict","verdict":"FAIR"}
            {"type":"verdict","verdict":"UNFAIR_FOR_B",
             "goods_hash":hex,"receipt_holder":id}
            {"type":"verdict","verdict":"UNFAIR_FOR_A",
             "goods_hash":hex,"eoo_holder":id}

Message field order follows the wire layout of each step:

  E1: ciphertext, cert{description, ciphertext_hash, goods_hash, enc_key,
      signature}, blinded_key, origin_proof
  E2: blinded_receipt, control, enc_randomizer, auth_token,
      recovery_cert{e, n, masked_exponent, signature}
  E3/E4/R2/R3: randomizer
  R1: recovery_cert, enc_randomizer, auth_token, sender_enc_randomizer,
      sender_randomizer, counterparty (routing metadata, unsigned)

Identical runs serialize to byte-identical files: nothing time- or
environment-dependent is recorded.
"""

import json

from .credentials import GoodsCertificate, RecoverableCert
from .crypto import PublicKey, hex_to_int, int_to_hex
from .protocol import (
    EncryptedReceipt,
    GoodsOffer,
    KeyRelease,
    ReceiptRelease,
    RecoveredGoodsKey,
    RecoveredReceiptKey,
    RecoveryRequest,
)


def _goods_cert_fields(cert: GoodsCertificate) -> dict:
    return {
        "description": cert.description.hex(),
        "ciphertext_hash": int_to_hex(cert.ciphertext_hash),
        "goods_hash": int_to_hex(cert.goods_hash),
        "enc_key": int_to_hex(cert.enc_key),
        "signature": int_to_hex(cert.signature),
    }


def goods_cert_from_fields(fields: dict) -> GoodsCertificate:
    return GoodsCertificate(
        description=bytes.fromhex(fields["description"]),
        ciphertext_hash=hex_to_int(fields["ciphertext_hash"]),
        goods_hash=hex_to_int(fields["goods_hash"]),
        enc_key=hex_to_int(fields["enc_key"]),
        signature=hex_to_int(fields["signature"]),
    )


def _recovery_cert_fields(cert: RecoverableCert) -> dict:
    return {
        "e": int_to_hex(cert.pub.e),
        "n": int_to_hex(cert.pub.n),
        "masked_exponent": int_to_hex(cert.masked_exponent),
        "signature": int_to_hex(cert.signature),
    }


def recovery_cert_from_fields(fields: dict) -> RecoverableCert:
    return RecoverableCert(
        pub=PublicKey(hex_to_int(fields["e"]), hex_to_int(fields["n"])),
        masked_exponent=hex_to_int(fields["masked_exponent"]),
        signature=hex_to_int(fields["signature"]),
    )


def body_fields(body) -> dict:
    """Serialize a message body, preserving wire field order."""
    if isinstance(body, GoodsOffer):
        return {
            "ciphertext": body.ciphertext.hex(),
            "cert": _goods_cert_fields(body.cert),
            "blinded_key": int_to_hex(body.blinded_key),
            "origin_proof": int_to_hex(body.origin_proof),
        }
    if isinstance(body, EncryptedReceipt):
        return {
            "blinded_receipt": int_to_hex(body.vres.blinded_receipt),
            "control": int_to_hex(body.vres.control),
            "enc_randomizer": int_to_hex(body.vres.enc_randomizer),
            "auth_token": int_to_hex(body.auth_token),
            "recovery_cert": _recovery_cert_fields(body.recovery_cert),
        }
    if isinstance(body, (KeyRelease, ReceiptRelease,
                         RecoveredReceiptKey, RecoveredGoodsKey)):
        return {"randomizer": int_to_hex(body.randomizer)}
    if isinstance(body, RecoveryRequest):
        return {
            "recovery_cert": _recovery_cert_fields(body.recovery_cert),
            "enc_randomizer": int_to_hex(body.enc_randomizer),
            "auth_token": int_to_hex(body.auth_token),
            "sender_enc_randomizer": int_to_hex(body.sender_enc_randomizer),
            "sender_randomizer": int_to_hex(body.sender_randomizer),
            "counterparty": body.counterparty,
        }
    raise TypeError(f"unknown message body {type(body).__name__}")


def message_record(body, sender: str, recipient: str, session: int) -> dict:
    return {
        "type": "message",
        "step": body.STEP,
        "session": session,
        "sender": sender,
        "recipient": recipient,
        "fields": body_fields(body),
    }


def milestone_record(label: str, session: int) -> dict:
    return {"type": "milestone", "session": session, "label": label}


def evidence_record(party: str, snapshot: dict) -> dict:
    return {
        "type": "evidence",
        "party": party,
        "goods": snapshot["goods"],
        "receipts": snapshot["receipts"],
        "origin_proofs": snapshot["origin_proofs"],
    }


def report_lines(header: dict, records: list, evidence: dict,
                 verdict_record: dict) -> list[str]:
    rows = [header]
    rows.extend(records)
    rows.extend(evidence_record(party, snap)
                for party, snap in sorted(evidence.items()))
    rows.append(verdict_record)
    return [json.dumps(row, separators=(",", ":")) for row in rows]


def write_report_lines(lines: list[str], path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for line in lines:
            handle.write(line + "\n")


def load_report(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
