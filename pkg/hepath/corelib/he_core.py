"""
Core library for the additively homomorphic cryptosystem.

Keys are generated as n = p*q with g fixed to n + 1, so encryption of m is
(1 + m*n) * r^n mod n^2. Ciphertexts carry the fingerprint of the key they
were produced under and every operation that mixes ciphertexts checks it.

Signed values live in the plaintext space through upper-half wraparound:
v is stored as v mod n and residues above n // 2 decode as negatives.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

from Cryptodome.Hash import SHA256
from Cryptodome.Util.number import GCD, getPrime, inverse, long_to_bytes

from .randomness import Randomness, default_randomness

logger = logging.getLogger(__name__)

MIN_KEY_BITS = 1024

# Default bit bound on coordinate magnitude.
COORD_BITS = 32


class KeyMismatchError(ValueError):
    """A ciphertext was used with a key it is not bound to."""


def fingerprint(n: int) -> str:
    """Short hex fingerprint of a public modulus."""
    return SHA256.new(long_to_bytes(n)).hexdigest()[:16]


@dataclass(frozen=True)
class PublicKey:
    """Public half of a key pair. Only ``n`` is stored; the rest is derived."""

    n: int = field(repr=False)
    n_sq: int = field(init=False, repr=False, compare=False)
    g: int = field(init=False, repr=False, compare=False)
    bits: int = field(init=False, compare=False)
    key_id: str = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError("public modulus must be an odd integer > 2")
        object.__setattr__(self, "n_sq", self.n * self.n)
        object.__setattr__(self, "g", self.n + 1)
        object.__setattr__(self, "bits", self.n.bit_length())
        object.__setattr__(self, "key_id", fingerprint(self.n))

    @property
    def ciphertext_bytes(self) -> int:
        """Fixed width of a serialized residue mod n^2."""
        return (self.n_sq.bit_length() + 7) // 8

    def check(self, *ciphertexts: "Ciphertext") -> None:
        for c in ciphertexts:
            if c.key_id != self.key_id:
                raise KeyMismatchError(
                    f"ciphertext bound to key {c.key_id}, expected {self.key_id}"
                )


@dataclass(frozen=True)
class PrivateKey:
    """Private half of a key pair, with CRT constants for fast decryption."""

    p: int
    q: int
    pk: PublicKey
    lam: int = field(init=False, repr=False)
    mu: int = field(init=False, repr=False)
    _hp: int = field(init=False, repr=False, compare=False)
    _hq: int = field(init=False, repr=False, compare=False)
    _q_inv: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.p == self.q:
            raise ValueError("prime factors must differ")
        if self.p * self.q != self.pk.n:
            raise ValueError("prime factors do not match the public modulus")
        p, q, n = self.p, self.q, self.pk.n
        lam = (p - 1) * (q - 1) // GCD(p - 1, q - 1)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", inverse(_L(pow(self.pk.g, lam, self.pk.n_sq), n), n))
        object.__setattr__(self, "_hp", inverse(_L(pow(self.pk.g, p - 1, p * p), p), p))
        object.__setattr__(self, "_hq", inverse(_L(pow(self.pk.g, q - 1, q * q), q), q))
        object.__setattr__(self, "_q_inv", inverse(q, p))


@dataclass(frozen=True)
class Ciphertext:
    """An encrypted residue, bound to the key that produced it."""

    value: int
    key_id: str

    def __repr__(self) -> str:
        return f"Ciphertext(key_id={self.key_id}, bits={self.value.bit_length()})"


def _L(x: int, d: int) -> int:
    return (x - 1) // d


def wrap(pk: PublicKey, value: int) -> Ciphertext:
    """Bind a raw residue to ``pk`` after range checking it."""
    if not 0 <= value < pk.n_sq:
        raise ValueError("ciphertext value out of range [0, n^2)")
    return Ciphertext(value, pk.key_id)


def keygen(bits: int = 2048, rng: Optional[Randomness] = None) -> Tuple[PublicKey, PrivateKey]:
    """
    Generate a key pair whose modulus has exactly ``bits`` bits.

    Args:
        bits: Key size; at least 1024 and even.
        rng: Randomness source (defaults to the system RNG).

    Returns:
        (PublicKey, PrivateKey)

    Examples:
        >>> pk, sk = keygen(1024)
        >>> pk.bits
        1024
    """
    if bits < MIN_KEY_BITS:
        raise ValueError(f"key size {bits} below minimum of {MIN_KEY_BITS} bits")
    if bits % 2:
        raise ValueError("key size must be even")
    rng = rng or default_randomness()
    half = bits // 2
    while True:
        p = getPrime(half, randfunc=rng.randfunc)
        q = getPrime(half, randfunc=rng.randfunc)
        if p == q or (p * q).bit_length() != bits:
            continue
        pk = PublicKey(p * q)
        logger.debug(f"Generated {bits}-bit key {pk.key_id}")
        return pk, PrivateKey(p, q, pk)


def _random_unit(pk: PublicKey, rng: Randomness) -> int:
    while True:
        r = rng.randbelow(pk.n)
        if r > 0 and GCD(r, pk.n) == 1:
            return r


def encrypt(pk: PublicKey, m: int, rng: Optional[Randomness] = None) -> Ciphertext:
    """Encrypt residue ``m`` in [0, n) with fresh randomness."""
    if not 0 <= m < pk.n:
        raise ValueError("plaintext out of range [0, n)")
    r = _random_unit(pk, rng or default_randomness())
    # g^m = (1 + n)^m = 1 + m*n mod n^2
    value = (1 + m * pk.n) % pk.n_sq * pow(r, pk.n, pk.n_sq) % pk.n_sq
    return Ciphertext(value, pk.key_id)


def decrypt(sk: PrivateKey, c: Ciphertext) -> int:
    """Decrypt to the exact residue in [0, n), using the CRT split over p and q."""
    sk.pk.check(c)
    p, q = sk.p, sk.q
    mp = _L(pow(c.value, p - 1, p * p), p) * sk._hp % p
    mq = _L(pow(c.value, q - 1, q * q), q) * sk._hq % q
    return mq + (mp - mq) * sk._q_inv % p * q


def decrypt_plain(sk: PrivateKey, c: Ciphertext) -> int:
    """Textbook decryption L(c^lambda mod n^2) * mu mod n; kept as a cross-check for the CRT path."""
    sk.pk.check(c)
    n = sk.pk.n
    return _L(pow(c.value, sk.lam, sk.pk.n_sq), n) * sk.mu % n


def add(pk: PublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    """Homomorphic addition: decrypts to (m1 + m2) mod n."""
    pk.check(c1, c2)
    return Ciphertext(c1.value * c2.value % pk.n_sq, pk.key_id)


def add_plain(pk: PublicKey, c: Ciphertext, k: int) -> Ciphertext:
    """Add a plaintext constant (signed allowed) without a fresh encryption."""
    pk.check(c)
    return Ciphertext(c.value * (1 + (k % pk.n) * pk.n) % pk.n_sq, pk.key_id)


def scalar_mul(pk: PublicKey, c: Ciphertext, k: int) -> Ciphertext:
    """Multiply the plaintext by integer ``k``; negative ``k`` is taken mod n, so k = -1 negates."""
    pk.check(c)
    return Ciphertext(pow(c.value, k % pk.n, pk.n_sq), pk.key_id)


def negate(pk: PublicKey, c: Ciphertext) -> Ciphertext:
    return scalar_mul(pk, c, -1)


def rerandomize(pk: PublicKey, c: Ciphertext, rng: Optional[Randomness] = None) -> Ciphertext:
    """Same plaintext, fresh ciphertext value."""
    pk.check(c)
    r = _random_unit(pk, rng or default_randomness())
    return Ciphertext(c.value * pow(r, pk.n, pk.n_sq) % pk.n_sq, pk.key_id)


def encode(pk: PublicKey, v: int) -> int:
    """Map a signed integer with |v| < n/2 into [0, n)."""
    if not -(pk.n // 2) <= v <= pk.n // 2:
        raise ValueError("signed value does not fit the plaintext space")
    return v % pk.n


def decode(pk: PublicKey, m: int) -> int:
    """Inverse of ``encode``: residues above n // 2 are negative."""
    if not 0 <= m < pk.n:
        raise ValueError("residue out of range [0, n)")
    return m - pk.n if m > pk.n // 2 else m


@dataclass(frozen=True)
class SignedCoord:
    """Bounded signed coordinate with encode/decode into the plaintext space."""

    v: int
    t: int = COORD_BITS

    def __post_init__(self) -> None:
        if abs(self.v) >= 1 << self.t:
            raise ValueError(f"coordinate {self.v} exceeds the {self.t}-bit bound")

    def encode(self, pk: PublicKey) -> int:
        return encode(pk, self.v)

    @classmethod
    def decode(cls, pk: PublicKey, m: int, t: int = COORD_BITS) -> "SignedCoord":
        return cls(decode(pk, m), t)


def encrypt_signed(pk: PublicKey, v: int, rng: Optional[Randomness] = None) -> Ciphertext:
    return encrypt(pk, encode(pk, v), rng)


def decrypt_signed(sk: PrivateKey, c: Ciphertext) -> int:
    return decode(sk.pk, decrypt(sk, c))
