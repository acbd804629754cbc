"""
Segment intersection evaluated against the peer's encrypted coordinates.

Alice drives every function here: her own points are plaintext, Bob's are
ciphertexts under his key. Products with a plaintext factor are computed
locally with scalar multiplication; only encrypted x encrypted products and
the final sign tests go over the channel.
"""

import logging
from typing import Set, Union

from hepath.corelib import he_core
from hepath.corelib.geometry import (
    AnyPoint,
    EncPath,
    EncPoint,
    EncSegment,
    Orientation,
    Path,
    Point,
    Segment,
    on_segment_plain,
    orientation_plain,
)

from .subprotocols import Operand, ProtocolCtx, difference, secure_leq, secure_mult, secure_sign

logger = logging.getLogger(__name__)

AnySegment = Union[Segment, EncSegment]


def _sub(ctx: ProtocolCtx, x: Operand, y: Operand) -> Operand:
    if isinstance(x, int) and isinstance(y, int):
        return x - y
    return difference(ctx, x, y)


def _mul(ctx: ProtocolCtx, x: Operand, y: Operand) -> Operand:
    if isinstance(x, int) and isinstance(y, int):
        return x * y
    if isinstance(x, int):
        return he_core.scalar_mul(ctx.pk, y, x)  # type: ignore[arg-type]
    if isinstance(y, int):
        return he_core.scalar_mul(ctx.pk, x, y)
    return secure_mult(ctx, x, y)


def enc_orientation(ctx: ProtocolCtx, a: AnyPoint, b: AnyPoint, c: AnyPoint) -> Orientation:
    """
    Orientation of (a, b, c) where any of the points may be encrypted.

    The determinant (b.y - a.y)(c.x - b.x) - (b.x - a.x)(c.y - b.y) is built
    homomorphically and classified with a single secure sign round.
    """
    if all(isinstance(p, Point) for p in (a, b, c)):
        return orientation_plain(a, b, c)  # type: ignore[arg-type]
    ids = {p.key_id for p in (a, b, c) if isinstance(p, EncPoint)}
    if ids != {ctx.pk.key_id}:
        raise he_core.KeyMismatchError(f"points bound to keys {sorted(ids)}, session key {ctx.pk.key_id}")
    left = _mul(ctx, _sub(ctx, b.y, a.y), _sub(ctx, c.x, b.x))
    right = _mul(ctx, _sub(ctx, b.x, a.x), _sub(ctx, c.y, b.y))
    det = _sub(ctx, left, right)
    if isinstance(det, int):
        return Orientation.from_sign(det)
    return Orientation.from_sign(secure_sign(ctx, det))


def _within(ctx: ProtocolCtx, v: Operand, e1: Operand, e2: Operand) -> bool:
    """min(e1, e2) <= v <= max(e1, e2) for one axis."""
    if isinstance(e1, int) and isinstance(e2, int):
        lo, hi = min(e1, e2), max(e1, e2)
        if isinstance(v, int):
            return lo <= v <= hi
        return secure_leq(ctx, lo, v) and secure_leq(ctx, v, hi)
    # Endpoint order is hidden: v is inside iff it does not lie strictly on one side of both.
    s1 = secure_sign(ctx, difference(ctx, v, e1))
    s2 = secure_sign(ctx, difference(ctx, v, e2))
    return s1 * s2 <= 0


def enc_on_segment(ctx: ProtocolCtx, p: AnyPoint, s: AnySegment) -> bool:
    """Bounding-box test of a collinear point against a segment, either side encrypted."""
    if isinstance(p, Point) and isinstance(s, Segment):
        return on_segment_plain(p, s)
    return _within(ctx, p.x, s.p.x, s.q.x) and _within(ctx, p.y, s.p.y, s.q.y)


def enc_intersect(ctx: ProtocolCtx, sa: Segment, sb: EncSegment) -> bool:
    """
    Whether Alice's plaintext segment meets Bob's encrypted one.

    Alice learns the boolean and the four orientations computed on the way.
    """
    a, b, c, d = sa.p, sa.q, sb.p, sb.q
    o1 = enc_orientation(ctx, a, b, c)
    o2 = enc_orientation(ctx, a, b, d)
    o3 = enc_orientation(ctx, c, d, a)
    o4 = enc_orientation(ctx, c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == o2 == o3 == o4 == Orientation.COLLINEAR:
        return (
            enc_on_segment(ctx, a, sb)
            or enc_on_segment(ctx, b, sb)
            or enc_on_segment(ctx, c, sa)
            or enc_on_segment(ctx, d, sa)
        )
    return False


def compare_paths(ctx: ProtocolCtx, pa: Path, pb: EncPath) -> Set[int]:
    """
    Indices of Alice's segments that intersect any of Bob's encrypted segments.

    Every (i, j) pair is evaluated in row-major order; a hit on segment i does
    not skip the remaining j.
    """
    hits: Set[int] = set()
    bob_segments = pb.segments()
    for i, sa in enumerate(pa.segments()):
        for sb in bob_segments:
            if enc_intersect(ctx, sa, sb):
                hits.add(i)
    logger.info(
        f"Compared {pa.segment_count}x{pb.segment_count} segments: "
        f"{len(hits)} colliding, {ctx.mult_calls} mult / {ctx.sign_calls} sign rounds"
    )
    return hits


def encrypt_path(pk: he_core.PublicKey, path: Path, rng=None) -> EncPath:
    """Encrypt every coordinate of ``path`` under ``pk``."""
    return EncPath(
        [
            EncPoint(he_core.encrypt_signed(pk, p.x, rng), he_core.encrypt_signed(pk, p.y, rng))
            for p in path.points
        ]
    )
