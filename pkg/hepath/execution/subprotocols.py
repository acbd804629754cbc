"""
Interactive two-party primitives over a counted channel.

Alice (the requester) holds ciphertexts under Bob's key; Bob (the responder)
holds the private key. Each primitive is one request/response round.

secure_mult:  Alice blinds x and y additively with uniform a, b and Bob
              returns Enc((x+a)(y+b)); Alice strips the cross terms.
secure_sign:  Alice blinds d multiplicatively with s in [1, 2^kappa] and a
              random sign flip; Bob answers with the sign of what he decrypts,
              Alice undoes the flip.

Leakage: Bob learns when a blinded operand is exactly zero, nothing else.
Alice learns every sign she asks for.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

from hepath.corelib import he_core
from hepath.corelib.he_core import Ciphertext, PrivateKey, PublicKey
from hepath.corelib.randomness import Randomness, default_randomness

from .wire import (
    CountedChannel,
    Frame,
    MessageTag,
    ProtocolError,
    deserialize_ciphertexts,
    pack_sign,
    serialize_ciphertexts,
    unpack_sign,
)

logger = logging.getLogger(__name__)

KAPPA = 40
DEFAULT_T_MAX = 72

Operand = Union[int, Ciphertext]


@dataclass(frozen=True)
class MultBlinding:
    a: int
    b: int


@dataclass(frozen=True)
class SignBlinding:
    s: int
    flip: int

    @property
    def factor(self) -> int:
        return -self.s if self.flip else self.s


@dataclass
class ProtocolCtx:
    """
    Per-session state shared by the primitives on one side of the channel.

    Args:
        pk: Bob's public key.
        channel: The counted channel to the peer.
        t_max: Bit bound on operand magnitudes; both parties must agree.
        rng: Source of blinding randomness.
    """

    pk: PublicKey
    channel: CountedChannel
    t_max: int = DEFAULT_T_MAX
    rng: Randomness = field(default_factory=default_randomness)
    mult_calls: int = 0
    sign_calls: int = 0

    def __post_init__(self) -> None:
        if self.t_max < 1:
            raise ValueError("t_max must be positive")
        # Blinded sign operands must stay clear of the wraparound at n/2.
        if self.t_max + KAPPA + 2 >= self.pk.bits:
            raise ValueError(
                f"t_max={self.t_max} too large for a {self.pk.bits}-bit key (kappa={KAPPA})"
            )

    @property
    def subprotocol_calls(self) -> int:
        return self.mult_calls + self.sign_calls

    @property
    def bound(self) -> int:
        return 1 << self.t_max

    def encrypt(self, v: int) -> Ciphertext:
        return he_core.encrypt_signed(self.pk, v, self.rng)

    def lift(self, v: Operand) -> Ciphertext:
        """Encrypt a plaintext operand; ciphertexts pass through after a key check."""
        if isinstance(v, Ciphertext):
            self.pk.check(v)
            return v
        self.check_bound(v)
        return self.encrypt(v)

    def check_bound(self, v: int) -> None:
        if abs(v) >= self.bound:
            raise ValueError(f"operand magnitude exceeds 2^{self.t_max}")


# Alice side


def draw_mult_blinding(ctx: ProtocolCtx) -> MultBlinding:
    return MultBlinding(ctx.rng.randbelow(ctx.pk.n), ctx.rng.randbelow(ctx.pk.n))


def draw_sign_blinding(ctx: ProtocolCtx) -> SignBlinding:
    return SignBlinding(ctx.rng.randint(1, 1 << KAPPA), ctx.rng.randbit())


def secure_mult(
    ctx: ProtocolCtx, cx: Ciphertext, cy: Ciphertext, blinding: Optional[MultBlinding] = None
) -> Ciphertext:
    """
    Ciphertext x ciphertext multiplication with one round trip to Bob.

    Returns:
        A ciphertext decrypting to x*y mod n.
    """
    pk = ctx.pk
    pk.check(cx, cy)
    bl = blinding or draw_mult_blinding(ctx)
    x_blind = he_core.rerandomize(pk, he_core.add_plain(pk, cx, bl.a), ctx.rng)
    y_blind = he_core.rerandomize(pk, he_core.add_plain(pk, cy, bl.b), ctx.rng)
    ctx.channel.send_frame(MessageTag.MUL_REQ, serialize_ciphertexts(pk, x_blind, y_blind))
    frame = ctx.channel.expect(MessageTag.MUL_RESP)
    (c_prod,) = deserialize_ciphertexts(pk, frame.payload, 1)
    ctx.mult_calls += 1
    # (x+a)(y+b) - b*x - a*y - a*b
    result = he_core.add(pk, c_prod, he_core.scalar_mul(pk, cx, -bl.b))
    result = he_core.add(pk, result, he_core.scalar_mul(pk, cy, -bl.a))
    return he_core.add_plain(pk, result, -bl.a * bl.b)


def secure_sign(ctx: ProtocolCtx, cd: Ciphertext, blinding: Optional[SignBlinding] = None) -> int:
    """
    Learn sign(d) in {-1, 0, +1} for an encrypted d with |d| < 2^t_max.

    Examples:
        A ciphertext of -4 yields -1; a ciphertext of 0 yields 0.
    """
    pk = ctx.pk
    pk.check(cd)
    bl = blinding or draw_sign_blinding(ctx)
    blinded = he_core.rerandomize(pk, he_core.scalar_mul(pk, cd, bl.factor), ctx.rng)
    ctx.channel.send_frame(MessageTag.SIGN_REQ, serialize_ciphertexts(pk, blinded))
    frame = ctx.channel.expect(MessageTag.SIGN_RESP)
    ctx.sign_calls += 1
    return unpack_sign(frame.payload) * (-1 if bl.flip else 1)


def difference(ctx: ProtocolCtx, x: Operand, y: Operand) -> Ciphertext:
    """Encryption of x - y for any mix of plaintext and encrypted operands."""
    pk = ctx.pk
    if isinstance(x, Ciphertext) and isinstance(y, Ciphertext):
        return he_core.add(pk, x, he_core.negate(pk, y))
    if isinstance(x, Ciphertext):
        return he_core.add_plain(pk, x, -y)  # type: ignore[operator]
    if isinstance(y, Ciphertext):
        return he_core.add_plain(pk, he_core.negate(pk, y), x)
    return ctx.encrypt(x - y)


def secure_leq(ctx: ProtocolCtx, x: Operand, y: Operand) -> bool:
    """1{x <= y}; at least one operand is expected to be encrypted."""
    return secure_sign(ctx, difference(ctx, x, y)) <= 0


def secure_equal(ctx: ProtocolCtx, x: Operand, y: Operand) -> bool:
    return secure_sign(ctx, difference(ctx, x, y)) == 0


def finish(ctx: ProtocolCtx) -> None:
    """Tell the responder no more requests are coming."""
    ctx.channel.send_frame(MessageTag.DONE)


# Bob side


def mult_responder(ctx: ProtocolCtx, sk: PrivateKey, frame: Optional[Frame] = None) -> None:
    """Answer one MUL_REQ: decrypt both blinded operands, reply with their encrypted product."""
    pk = ctx.pk
    frame = frame or ctx.channel.expect(MessageTag.MUL_REQ)
    cx, cy = deserialize_ciphertexts(pk, frame.payload, 2)
    product = he_core.decrypt(sk, cx) * he_core.decrypt(sk, cy) % pk.n
    ctx.channel.send_frame(
        MessageTag.MUL_RESP, serialize_ciphertexts(pk, he_core.encrypt(pk, product, ctx.rng))
    )
    ctx.mult_calls += 1


def sign_responder(ctx: ProtocolCtx, sk: PrivateKey, frame: Optional[Frame] = None) -> None:
    """Answer one SIGN_REQ with the sign of the decrypted, blinded value."""
    pk = ctx.pk
    frame = frame or ctx.channel.expect(MessageTag.SIGN_REQ)
    (cd,) = deserialize_ciphertexts(pk, frame.payload, 1)
    value = he_core.decrypt_signed(sk, cd)
    if value.bit_length() > ctx.t_max + KAPPA:
        raise ProtocolError("blinded operand exceeds the agreed bound")
    sign = (value > 0) - (value < 0)
    if sign == 0:
        logger.debug("sign round: zero event")
    ctx.channel.send_frame(MessageTag.SIGN_RESP, pack_sign(sign))
    ctx.sign_calls += 1


def serve_requests(ctx: ProtocolCtx, sk: PrivateKey) -> None:
    """Bob's loop: answer MUL_REQ and SIGN_REQ frames until DONE."""
    while True:
        frame = ctx.channel.recv_frame()
        if frame.tag == MessageTag.MUL_REQ:
            mult_responder(ctx, sk, frame)
        elif frame.tag == MessageTag.SIGN_REQ:
            sign_responder(ctx, sk, frame)
        elif frame.tag == MessageTag.DONE:
            logger.debug(
                f"Responder done after {ctx.mult_calls} mult and {ctx.sign_calls} sign rounds"
            )
            return
        else:
            raise ProtocolError(f"unexpected {frame.tag.name} while serving requests")
