"""
Core library for plane geometry on integer coordinates.

Holds the point, segment and path types shared by both parties and the
plaintext intersection oracle that the encrypted evaluation must agree with.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Iterator, List, Sequence, Tuple, Union

from .he_core import COORD_BITS, Ciphertext, SignedCoord

COORD_LIMIT = 1 << COORD_BITS


class Orientation(Enum):
    CLOCKWISE = 1
    COUNTERCLOCKWISE = -1
    COLLINEAR = 0

    @classmethod
    def from_sign(cls, sign: int) -> "Orientation":
        if sign > 0:
            return cls.CLOCKWISE
        if sign < 0:
            return cls.COUNTERCLOCKWISE
        return cls.COLLINEAR


@dataclass(frozen=True)
class Point:
    x: int
    y: int

    def __post_init__(self) -> None:
        for v in (self.x, self.y):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ValueError(f"coordinate {v!r} is not an integer")
            SignedCoord(v)


@dataclass(frozen=True)
class EncPoint:
    """A point whose coordinates are encrypted under the peer's key."""

    x: Ciphertext
    y: Ciphertext

    def __post_init__(self) -> None:
        if self.x.key_id != self.y.key_id:
            raise ValueError("encrypted point coordinates bound to different keys")

    @property
    def key_id(self) -> str:
        return self.x.key_id


AnyPoint = Union[Point, EncPoint]


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point


@dataclass(frozen=True)
class EncSegment:
    p: EncPoint
    q: EncPoint


class _Polyline:
    """Ordered points; segment i spans points i and i + 1."""

    def __init__(self, points: Sequence) -> None:
        if len(points) < 1:
            raise ValueError("a path needs at least one point")
        self.points = list(points)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        return type(self) is type(other) and self.points == other.points  # type: ignore[attr-defined]

    @property
    def segment_count(self) -> int:
        return len(self.points) - 1


class Path(_Polyline):
    points: List[Point]

    def segments(self) -> List[Segment]:
        return [Segment(a, b) for a, b in zip(self.points, self.points[1:])]

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[int, int]]) -> "Path":
        return cls([Point(x, y) for x, y in pairs])

    def to_pairs(self) -> List[Tuple[int, int]]:
        return [(p.x, p.y) for p in self.points]

    def __repr__(self) -> str:
        return f"Path({self.to_pairs()})"


class EncPath(_Polyline):
    points: List[EncPoint]

    def segments(self) -> List[EncSegment]:
        return [EncSegment(a, b) for a, b in zip(self.points, self.points[1:])]

    def __iter__(self) -> Iterator[EncPoint]:
        return iter(self.points)


def orientation_determinant(a: Point, b: Point, c: Point) -> int:
    return (b.y - a.y) * (c.x - b.x) - (b.x - a.x) * (c.y - b.y)


def orientation_plain(a: Point, b: Point, c: Point) -> Orientation:
    """
    Orientation of the ordered triplet (a, b, c).

    Examples:
        >>> orientation_plain(Point(0, 0), Point(4, 4), Point(1, 2))
        <Orientation.COUNTERCLOCKWISE: -1>
    """
    return Orientation.from_sign(orientation_determinant(a, b, c))


def on_segment_plain(p: Point, s: Segment) -> bool:
    """Bounding-box test; only meaningful when p is collinear with s."""
    return (
        min(s.p.x, s.q.x) <= p.x <= max(s.p.x, s.q.x)
        and min(s.p.y, s.q.y) <= p.y <= max(s.p.y, s.q.y)
    )


def intersect_plain(s1: Segment, s2: Segment) -> bool:
    """
    Decide whether two closed segments share a point. Touching endpoints count.

    Examples:
        >>> intersect_plain(Segment(Point(0, 0), Point(10, 10)), Segment(Point(0, 10), Point(10, 0)))
        True
    """
    a, b, c, d = s1.p, s1.q, s2.p, s2.q
    o1 = orientation_plain(a, b, c)
    o2 = orientation_plain(a, b, d)
    o3 = orientation_plain(c, d, a)
    o4 = orientation_plain(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    if o1 == o2 == o3 == o4 == Orientation.COLLINEAR:
        return (
            on_segment_plain(a, s2)
            or on_segment_plain(b, s2)
            or on_segment_plain(c, s1)
            or on_segment_plain(d, s1)
        )
    return False


def compare_paths_plain(pa: Path, pb: Path) -> set:
    """Indices of ``pa`` segments that intersect any segment of ``pb``."""
    bs = pb.segments()
    return {i for i, sa in enumerate(pa.segments()) if any(intersect_plain(sa, sb) for sb in bs)}
