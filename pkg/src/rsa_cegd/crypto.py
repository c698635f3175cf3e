"""Integer-level cryptographic substrate for the exchange toolkit.

Everything works on plain Python ints (arbitrary precision, non-negative).
The canonical serialized form of an integer is lowercase big-endian hex with
no leading zeros ("0" for the value zero); raw byte strings serialize as
plain hex. Multi-part hash inputs are length-prefixed per part so that no
two distinct field sequences can collide by concatenation.

All functions here are pure and deterministic given their arguments; key
generation is deterministic given its seed, which is what lets whole
protocol transcripts reproduce bit for bit.
"""

import hashlib
import random
from dataclasses import dataclass
from math import gcd

HASH_BITS = 256
HASH_BOUND = 1 << HASH_BITS

_KEYGEN_ATTEMPTS = 50000
_SAMPLE_ATTEMPTS = 100000


class NotInvertible(ValueError):
    """Requested an inverse of a residue that is not a unit."""


class GenerationFailure(RuntimeError):
    """Rejection sampling exhausted its retry budget."""


def int_to_hex(value: int) -> str:
    """Canonical hex form: lowercase, big-endian, no leading zeros."""
    if value < 0:
        raise ValueError("negative values have no canonical form")
    return format(value, "x")


def hex_to_int(text: str) -> int:
    value = int(text, 16)
    if value < 0:
        raise ValueError("negative values have no canonical form")
    return value


def encode_fields(*parts) -> bytes:
    """Length-prefixed encoding of a field sequence for hashing.

    Ints are rendered in canonical hex, strings as UTF-8; every part is
    prefixed with its 8-byte big-endian length.
    """
    out = bytearray()
    for part in parts:
        if isinstance(part, int):
            raw = int_to_hex(part).encode("ascii")
        elif isinstance(part, str):
            raw = part.encode("utf-8")
        elif isinstance(part, (bytes, bytearray)):
            raw = bytes(part)
        else:
            raise TypeError(f"cannot encode field of type {type(part).__name__}")
        out += len(raw).to_bytes(8, "big")
        out += raw
    return bytes(out)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """base**exponent mod modulus, for non-negative operands."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    if base < 0 or exponent < 0:
        raise ValueError("operands must be non-negative")
    return pow(base, exponent, modulus)


def mod_inv(value: int, modulus: int) -> int:
    """Multiplicative inverse of value mod modulus.

    Raises NotInvertible when gcd(value, modulus) != 1.
    """
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    try:
        return pow(value, -1, modulus)
    except ValueError as exc:
        raise NotInvertible(f"{value} is not invertible mod {modulus}") from exc


def hash_int(tag: str, data: bytes, modulus: int) -> int:
    """SHA-256 of tag || data as a big-endian integer, reduced mod modulus.

    The tag is a fixed domain-separation label; every hashing site in the
    protocol uses a distinct one so values produced for one purpose cannot
    be replayed as another. Coprimality of the result with the modulus is
    NOT guaranteed.
    """
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    digest = hashlib.sha256(tag.encode("utf-8") + data).digest()
    return int.from_bytes(digest, "big") % modulus


def sym_encrypt(key: int, plaintext: bytes) -> bytes:
    """Deterministic keystream cipher; block i of the stream is the hash
    of (key, i). Length-preserving; its own inverse."""
    out = bytearray()
    for index, pos in enumerate(range(0, len(plaintext), 32)):
        chunk = plaintext[pos:pos + 32]
        stream = hashlib.sha256(encode_fields(key, index)).digest()
        out += bytes(a ^ b for a, b in zip(chunk, stream))
    return bytes(out)


def sym_decrypt(key: int, ciphertext: bytes) -> bytes:
    return sym_encrypt(key, ciphertext)


def _sieve(limit):
    flags = bytearray([1]) * limit
    flags[0:2] = b"\x00\x00"
    for i in range(2, int(limit ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
    return [i for i, f in enumerate(flags) if f]


_SMALL_PRIMES = _sieve(1000)
# Fixed Miller-Rabin bases: the first 40 primes. Deterministic, so primality
# answers never depend on RNG state.
_MR_BASES = _SMALL_PRIMES[:40]


def is_probable_prime(candidate: int) -> bool:
    """Trial division by primes < 1000, then 40 Miller-Rabin rounds."""
    if candidate < 2:
        return False
    for p in _SMALL_PRIMES:
        if candidate == p:
            return True
        if candidate % p == 0:
            return False
    if candidate < 1009 * 1009:
        return True
    d = candidate - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for base in _MR_BASES:
        x = pow(base, d, candidate)
        if x == 1 or x == candidate - 1:
            continue
        for _ in range(r - 1):
            x = pow(x, 2, candidate)
            if x == candidate - 1:
                break
        else:
            return False
    return True


def random_prime_below(rng: random.Random, bound: int, coprime_to=()) -> int:
    """Sample a prime in (1, bound), coprime to every given modulus."""
    if bound <= 2:
        raise ValueError("bound too small to contain a prime")
    for _ in range(_SAMPLE_ATTEMPTS):
        candidate = rng.randrange(2, bound)
        if candidate > 2:
            candidate |= 1
        if candidate >= bound:
            continue
        if not is_probable_prime(candidate):
            continue
        if any(gcd(candidate, m) != 1 for m in coprime_to):
            continue
        return candidate
    raise GenerationFailure(f"no usable prime below {bound} found")


def random_unit(rng: random.Random, modulus: int) -> int:
    """Sample k with 1 < k < modulus and gcd(k, modulus) = 1."""
    if modulus <= 3:
        raise ValueError("modulus too small")
    for _ in range(_SAMPLE_ATTEMPTS):
        candidate = rng.randrange(2, modulus)
        if gcd(candidate, modulus) == 1:
            return candidate
    raise GenerationFailure(f"no unit below {modulus} found")


@dataclass(frozen=True)
class PublicKey:
    """RSA public half: (exponent, modulus)."""
    e: int
    n: int


@dataclass(frozen=True)
class RsaKeyPair:
    n: int
    e: int
    d: int
    p: int
    q: int

    @property
    def public(self) -> PublicKey:
        return PublicKey(self.e, self.n)


def keypair_from_primes(p: int, q: int, e: int) -> RsaKeyPair:
    """Build a keypair from explicit primes; the private exponent is the
    inverse of e modulo (p-1)(q-1)."""
    if not (is_probable_prime(p) and is_probable_prime(q)):
        raise ValueError("p and q must both be prime")
    if p == q:
        raise ValueError("p and q must differ")
    if e < 3 or e % 2 == 0:
        raise ValueError("public exponent must be odd and >= 3")
    phi = (p - 1) * (q - 1)
    if e >= phi:
        raise ValueError("public exponent must be < phi(n)")
    if gcd(e, phi) != 1:
        raise ValueError("public exponent shares a factor with phi(n)")
    return RsaKeyPair(n=p * q, e=e, d=pow(e, -1, phi), p=p, q=q)


def _sample_prime_bits(rng: random.Random, nbits: int) -> int:
    # Top two bits forced so a product of two such primes has exactly the
    # requested modulus width.
    for _ in range(_SAMPLE_ATTEMPTS):
        candidate = rng.getrandbits(nbits) | (1 << (nbits - 1)) | (1 << (nbits - 2)) | 1
        if is_probable_prime(candidate):
            return candidate
    raise GenerationFailure(f"no {nbits}-bit prime found")


def rsa_keygen_with_exponent(bits: int, exponent: int, seed: int) -> RsaKeyPair:
    """Generate a keypair with an exact modulus width and a caller-fixed
    public exponent, deterministically from the seed.

    Prime candidates are rejection-sampled until gcd(e, p-1) = gcd(e, q-1)
    = 1 and e < phi(n); with small exponents (e = 3) or small moduli that
    retry path is routinely exercised.
    """
    if bits < 16:
        raise ValueError("modulus width must be >= 16 bits")
    if exponent < 3 or exponent % 2 == 0:
        raise ValueError("public exponent must be odd and >= 3")
    rng = random.Random(seed)
    p_bits = bits - bits // 2
    q_bits = bits // 2
    for _ in range(_KEYGEN_ATTEMPTS):
        p = _sample_prime_bits(rng, p_bits)
        if gcd(exponent, p - 1) != 1:
            continue
        q = _sample_prime_bits(rng, q_bits)
        if q == p or gcd(exponent, q - 1) != 1:
            continue
        phi = (p - 1) * (q - 1)
        if exponent >= phi:
            continue
        pair = RsaKeyPair(n=p * q, e=exponent, d=pow(exponent, -1, phi), p=p, q=q)
        assert pair.n.bit_length() == bits
        return pair
    raise GenerationFailure(f"no {bits}-bit keypair admits exponent {exponent}")


def derive_seed(master: int, label: str) -> int:
    """Stable per-purpose sub-seed so independent sampling streams never
    shift each other."""
    digest = hashlib.sha256(encode_fields(master, label)).digest()
    return int.from_bytes(digest[:16], "big")
