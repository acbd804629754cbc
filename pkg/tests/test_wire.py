import struct

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hepath.corelib import he_core
from hepath.corelib.geometry import EncPath, EncPoint, Path
from hepath.corelib.he_core import PublicKey
from hepath.execution.enc_geometry import encrypt_path
from hepath.execution.wire import (
    HEADER_SIZE,
    MAX_FRAME_SIZE,
    ChannelClosedError,
    CountedChannel,
    MessageTag,
    ProtocolError,
    deserialize_ciphertext,
    deserialize_enc_path,
    deserialize_pubkey,
    pack_sign,
    serialize_ciphertext,
    serialize_enc_path,
    serialize_pubkey,
    unpack_sign,
)


@pytest.fixture
def channels():
    alice, bob = CountedChannel.pair()
    yield alice, bob
    alice.close()
    bob.close()


def test_frame_byte_accounting(channels):
    alice, bob = channels
    alice.send_frame(MessageTag.PUBKEY, b"abc")
    alice.send_frame(MessageTag.DONE)
    assert alice.bytes_out == (HEADER_SIZE + 3) + HEADER_SIZE
    frame = bob.recv_frame()
    assert frame.tag == MessageTag.PUBKEY
    assert frame.payload == b"abc"
    assert bob.recv_frame().payload == b""
    assert bob.bytes_in == alice.bytes_out
    assert [(e.direction, e.tag, e.size) for e in bob.transcript] == [
        ("in", MessageTag.PUBKEY, 8),
        ("in", MessageTag.DONE, 5),
    ]


def test_oversized_frame_rejected_on_send(channels):
    alice, _ = channels
    with pytest.raises(ProtocolError):
        alice.send_frame(MessageTag.ENC_ROUTE, b"\0" * (MAX_FRAME_SIZE + 1))
    assert alice.bytes_out == 0


def test_oversized_frame_rejected_on_receive(channels):
    alice, bob = channels
    alice.sock.sendall(struct.pack(">IB", MAX_FRAME_SIZE + 1, MessageTag.ENC_ROUTE))
    with pytest.raises(ProtocolError):
        bob.recv_frame()
    assert bob.bytes_in == HEADER_SIZE


def test_unknown_tag_rejected(channels):
    alice, bob = channels
    alice.sock.sendall(struct.pack(">IB", 0, 0x55))
    with pytest.raises(ProtocolError, match="unknown message tag"):
        bob.recv_frame()
    assert bob.bytes_in == HEADER_SIZE
    assert bob.transcript == []


def test_closed_stream(channels):
    alice, bob = channels
    alice.sock.sendall(struct.pack(">IB", 10, MessageTag.PUBKEY) + b"abc")
    alice.close()
    with pytest.raises(ChannelClosedError):
        bob.recv_frame()


def test_expect_rejects_wrong_tag(channels):
    alice, bob = channels
    alice.send_frame(MessageTag.SIGN_RESP, pack_sign(1))
    with pytest.raises(ProtocolError, match="expected MUL_RESP"):
        bob.expect(MessageTag.MUL_RESP)


def test_pubkey_roundtrip(pk):
    assert deserialize_pubkey(serialize_pubkey(pk)) == pk


def test_pubkey_trailing_bytes_rejected(pk):
    with pytest.raises(ProtocolError):
        deserialize_pubkey(serialize_pubkey(pk) + b"\0")


def test_enc_path_roundtrip(pk, sk):
    path = Path.from_pairs([(-99, 99), (0, 0), (42, -7)])
    enc = encrypt_path(pk, path)
    back = deserialize_enc_path(pk, serialize_enc_path(pk, enc))
    assert back == enc
    assert [(he_core.decrypt_signed(sk, p.x), he_core.decrypt_signed(sk, p.y)) for p in back] == path.to_pairs()


def test_empty_enc_path_rejected(pk):
    with pytest.raises(ProtocolError):
        deserialize_enc_path(pk, struct.pack(">I", 0))


def test_enc_path_count_exceeding_payload_rejected(pk):
    enc = encrypt_path(pk, Path.from_pairs([(1, 1)]))
    data = serialize_enc_path(pk, enc)
    with pytest.raises(ProtocolError):
        deserialize_enc_path(pk, struct.pack(">I", 1000) + data[4:])


def test_two_point_path_size_with_2048_bit_modulus():
    # Any odd 2048-bit modulus fixes the serialized widths.
    pk = PublicKey((1 << 2047) + 1)
    assert pk.ciphertext_bytes == 512
    point = EncPoint(he_core.wrap(pk, 3), he_core.wrap(pk, pk.n_sq - 1))
    payload = serialize_enc_path(pk, EncPath([point, point]))
    assert len(payload) == 4 + 2 * 2 * (4 + 512)


def test_ciphertext_out_of_range_rejected(pk):
    # All-ones at the padded width is a residue >= n^2.
    data = struct.pack(">I", pk.ciphertext_bytes) + b"\xff" * pk.ciphertext_bytes
    with pytest.raises(ProtocolError):
        deserialize_ciphertext(pk, data)


def test_truncated_ciphertext_rejected(pk):
    data = serialize_ciphertext(pk, he_core.encrypt(pk, 1))
    with pytest.raises(ProtocolError, match="truncated"):
        deserialize_ciphertext(pk, data[:-1])


def test_sign_codec():
    for s in (-1, 0, 1):
        assert unpack_sign(pack_sign(s)) == s
    with pytest.raises(ValueError):
        pack_sign(2)
    with pytest.raises(ProtocolError):
        unpack_sign(b"\x05")
    with pytest.raises(ProtocolError):
        unpack_sign(b"")


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_ciphertext_roundtrip_fuzzed(pk, data):
    value = data.draw(st.integers(min_value=0, max_value=pk.n_sq - 1))
    c = he_core.wrap(pk, value)
    raw = serialize_ciphertext(pk, c)
    assert len(raw) == 4 + pk.ciphertext_bytes
    assert deserialize_ciphertext(pk, raw) == c


@settings(max_examples=50, deadline=None)
@given(st.binary(max_size=64))
def test_garbage_pubkey_never_crashes_unexpectedly(data):
    try:
        deserialize_pubkey(data)
    except ProtocolError:
        pass
