#!/usr/bin/env python3
"""
Framed message channel between the two parties.

Every frame is a 4-byte big-endian payload length, a 1-byte tag and the
payload. The channel counts every byte it writes and reads, headers included,
and keeps a transcript of (direction, tag, size) for auditing.
"""

import logging
import socket
import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional, Tuple

from Cryptodome.Util.number import bytes_to_long, long_to_bytes

from hepath.corelib.geometry import EncPath, EncPoint
from hepath.corelib.he_core import Ciphertext, PublicKey, wrap

logger = logging.getLogger(__name__)

HEADER = struct.Struct(">IB")
HEADER_SIZE = HEADER.size
MAX_FRAME_SIZE = 1 << 20
_LEN = struct.Struct(">I")


class ProtocolError(RuntimeError):
    """The peer sent something the protocol does not allow."""


class ChannelClosedError(ProtocolError):
    """The stream ended before a full frame arrived."""


class MessageTag(IntEnum):
    PUBKEY = 0x01
    ENC_ROUTE = 0x02
    MUL_REQ = 0x10
    MUL_RESP = 0x11
    SIGN_REQ = 0x20
    SIGN_RESP = 0x21
    DONE = 0x7F


@dataclass(frozen=True)
class Frame:
    tag: MessageTag
    payload: bytes

    @property
    def length(self) -> int:
        return len(self.payload)


@dataclass(frozen=True)
class TranscriptEntry:
    direction: str  # "out" or "in"
    tag: MessageTag
    size: int


class CountedChannel:
    """
    Framed, byte-counting wrapper around a connected stream socket.

    The counters are monotone for the life of the channel.
    """

    def __init__(self, sock: socket.socket, name: str = "channel"):
        """
        Args:
            sock: A connected, reliable, ordered stream socket.
            name: Label used in log lines.
        """
        self.sock = sock
        self.name = name
        self.bytes_out = 0
        self.bytes_in = 0
        self.transcript: List[TranscriptEntry] = []
        self.closed = False

    @classmethod
    def connect(cls, host: str, port: int, timeout: Optional[float] = 30.0) -> "CountedChannel":
        sock = socket.create_connection((host, port), timeout=timeout)
        sock.settimeout(None)
        logger.info(f"Connected to {host}:{port}")
        return cls(sock, name="alice")

    @classmethod
    def accept_one(cls, host: str, port: int) -> "CountedChannel":
        """Listen on host:port and return a channel for the first connection."""
        with socket.create_server((host, port)) as server:
            logger.info(f"Listening on {host}:{port}")
            sock, addr = server.accept()
        logger.info(f"Accepted connection from {addr[0]}:{addr[1]}")
        return cls(sock, name="bob")

    @classmethod
    def pair(cls) -> Tuple["CountedChannel", "CountedChannel"]:
        """Two connected in-process channels: (alice_side, bob_side)."""
        a, b = socket.socketpair()
        return cls(a, name="alice"), cls(b, name="bob")

    @property
    def bytes_total(self) -> int:
        return self.bytes_out + self.bytes_in

    def send_frame(self, tag: MessageTag, payload: bytes = b"") -> None:
        if self.closed:
            raise ProtocolError(f"{self.name}: send on closed channel")
        if len(payload) > MAX_FRAME_SIZE:
            raise ProtocolError(f"{self.name}: frame of {len(payload)} bytes exceeds cap")
        data = HEADER.pack(len(payload), int(tag)) + payload
        self.sock.sendall(data)
        self.bytes_out += len(data)
        self.transcript.append(TranscriptEntry("out", MessageTag(tag), len(data)))
        logger.debug(f"{self.name} sent {MessageTag(tag).name} ({len(data)} bytes)")

    def _recv_exact(self, count: int) -> bytes:
        chunks = []
        got = 0
        while got < count:
            chunk = self.sock.recv(count - got)
            if not chunk:
                raise ChannelClosedError(f"{self.name}: peer closed the stream")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def recv_frame(self) -> Frame:
        length, raw_tag = HEADER.unpack(self._recv_exact(HEADER_SIZE))
        self.bytes_in += HEADER_SIZE
        if length > MAX_FRAME_SIZE:
            raise ProtocolError(f"{self.name}: incoming frame of {length} bytes too large")
        try:
            tag = MessageTag(raw_tag)
        except ValueError:
            raise ProtocolError(f"{self.name}: unknown message tag 0x{raw_tag:02x}") from None
        payload = self._recv_exact(length) if length else b""
        self.bytes_in += length
        self.transcript.append(TranscriptEntry("in", tag, HEADER_SIZE + length))
        logger.debug(f"{self.name} received {tag.name} ({HEADER_SIZE + length} bytes)")
        return Frame(tag, payload)

    def expect(self, *tags: MessageTag) -> Frame:
        """Receive one frame and fail unless its tag is among ``tags``."""
        frame = self.recv_frame()
        if frame.tag not in tags:
            wanted = "/".join(t.name for t in tags)
            raise ProtocolError(f"{self.name}: expected {wanted}, got {frame.tag.name}")
        return frame

    def inbound_tags(self) -> List[MessageTag]:
        return [e.tag for e in self.transcript if e.direction == "in"]

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            try:
                self.sock.close()
            except OSError as e:
                logger.warning(f"{self.name}: error closing socket: {e}")

    def __enter__(self) -> "CountedChannel":
        return self

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        self.close()


# Serialization. Integers are a 4-byte big-endian length followed by the
# big-endian magnitude; ciphertexts are padded to the width of n^2.


class Reader:
    """Cursor over a payload that fails loudly on truncation."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise ProtocolError("truncated payload")
        chunk = self.data[self.pos:self.pos + count]
        self.pos += count
        return chunk

    def u32(self) -> int:
        return _LEN.unpack(self.take(4))[0]

    def big_int(self) -> int:
        return bytes_to_long(self.take(self.u32()))

    def finish(self) -> None:
        if self.pos != len(self.data):
            raise ProtocolError(f"{len(self.data) - self.pos} trailing bytes in payload")


def pack_int(value: int, width: Optional[int] = None) -> bytes:
    if value < 0:
        raise ValueError("residues carry no sign")
    raw = long_to_bytes(value, width) if width else long_to_bytes(value)
    return _LEN.pack(len(raw)) + raw


def serialize_pubkey(pk: PublicKey) -> bytes:
    return pack_int(pk.n)


def deserialize_pubkey(data: bytes) -> PublicKey:
    reader = Reader(data)
    n = reader.big_int()
    reader.finish()
    try:
        return PublicKey(n)
    except ValueError as e:
        raise ProtocolError(f"invalid public key: {e}") from e


def serialize_ciphertext(pk: PublicKey, c: Ciphertext) -> bytes:
    pk.check(c)
    return pack_int(c.value, pk.ciphertext_bytes)


def read_ciphertext(pk: PublicKey, reader: Reader) -> Ciphertext:
    try:
        return wrap(pk, reader.big_int())
    except ValueError as e:
        raise ProtocolError(str(e)) from e


def deserialize_ciphertext(pk: PublicKey, data: bytes) -> Ciphertext:
    reader = Reader(data)
    c = read_ciphertext(pk, reader)
    reader.finish()
    return c


def serialize_ciphertexts(pk: PublicKey, *cs: Ciphertext) -> bytes:
    return b"".join(serialize_ciphertext(pk, c) for c in cs)


def deserialize_ciphertexts(pk: PublicKey, data: bytes, count: int) -> List[Ciphertext]:
    reader = Reader(data)
    out = [read_ciphertext(pk, reader) for _ in range(count)]
    reader.finish()
    return out


def serialize_enc_path(pk: PublicKey, path: EncPath) -> bytes:
    parts = [_LEN.pack(len(path))]
    for pt in path:
        parts.append(serialize_ciphertexts(pk, pt.x, pt.y))
    return b"".join(parts)


def deserialize_enc_path(pk: PublicKey, data: bytes) -> EncPath:
    reader = Reader(data)
    count = reader.u32()
    if count < 1:
        raise ProtocolError("encrypted route has no points")
    # Two ciphertexts per point; refuse counts the payload cannot hold.
    if count * 2 * (4 + pk.ciphertext_bytes) > len(data) - 4:
        raise ProtocolError(f"encrypted route claims {count} points but payload is too short")
    points = [EncPoint(read_ciphertext(pk, reader), read_ciphertext(pk, reader)) for _ in range(count)]
    reader.finish()
    return EncPath(points)


def pack_sign(sign: int) -> bytes:
    if sign not in (-1, 0, 1):
        raise ValueError(f"sign must be -1, 0 or 1, got {sign}")
    return struct.pack(">b", sign)


def unpack_sign(data: bytes) -> int:
    if len(data) != 1:
        raise ProtocolError("sign response must be exactly one byte")
    sign = struct.unpack(">b", data)[0]
    if sign not in (-1, 0, 1):
        raise ProtocolError(f"sign response out of range: {sign}")
    return sign
