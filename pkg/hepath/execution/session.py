"""
Alice and Bob protocol sessions.

Bob encrypts his route under his own key, sends PUBKEY then ENC_ROUTE, and
answers subprotocol requests until DONE. Alice receives both, runs the
encrypted intersection test over every segment pair and keeps the result.
Nothing carrying a comparison outcome is ever sent to Bob.
"""

import logging
import time
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Set, Tuple

from hepath.corelib.geometry import EncPath, Path
from hepath.corelib.he_core import PrivateKey, PublicKey
from hepath.corelib.randomness import Randomness, default_randomness

from .enc_geometry import compare_paths, encrypt_path
from .loopback import BackgroundParty
from .subprotocols import DEFAULT_T_MAX, ProtocolCtx, finish, serve_requests
from .wire import (
    CountedChannel,
    MessageTag,
    ProtocolError,
    deserialize_enc_path,
    deserialize_pubkey,
    serialize_enc_path,
    serialize_pubkey,
)

logger = logging.getLogger(__name__)

KeyPair = Tuple[PublicKey, PrivateKey]

# Tags Bob may ever receive.
BOB_INBOUND_TAGS = frozenset({MessageTag.MUL_REQ, MessageTag.SIGN_REQ, MessageTag.DONE})


@dataclass
class Metrics:
    """Timing and traffic for one party in one session."""

    role: str
    setup_s: float = 0.0
    compare_s: float = 0.0
    bytes_out: int = 0
    bytes_in: int = 0
    mult_calls: int = 0
    sign_calls: int = 0

    @property
    def wall_time_s(self) -> float:
        return self.setup_s + self.compare_s

    @property
    def subprotocol_calls(self) -> int:
        return self.mult_calls + self.sign_calls

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["wall_time_s"] = self.wall_time_s
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Metrics":
        fields = {k: data[k] for k in ("role", "setup_s", "compare_s", "bytes_out", "bytes_in", "mult_calls", "sign_calls")}
        return cls(**fields)


class BobState(Enum):
    AWAIT_CONNECT = "await_connect"
    SENT_ROUTE = "sent_route"
    SERVING = "serving"
    DONE = "done"


class BobSession:
    """Key holder. Serves one comparison and never learns its outcome."""

    def __init__(self, keypair: KeyPair, path: Path, rng: Optional[Randomness] = None, t_max: int = DEFAULT_T_MAX):
        self.pk, self.sk = keypair
        self.path = path
        self.rng = rng or default_randomness()
        self.t_max = t_max
        self.state = BobState.AWAIT_CONNECT
        self.enc_path: Optional[EncPath] = None

    def prepare(self) -> float:
        """Encrypt the route ahead of a connection; returns the seconds spent."""
        start = time.perf_counter()
        self.enc_path = encrypt_path(self.pk, self.path, self.rng)
        return time.perf_counter() - start

    def run(self, channel: CountedChannel) -> Metrics:
        metrics = Metrics(role="bob")
        if self.enc_path is None:
            metrics.setup_s += self.prepare()
        ctx = ProtocolCtx(self.pk, channel, self.t_max, self.rng)
        try:
            start = time.perf_counter()
            channel.send_frame(MessageTag.PUBKEY, serialize_pubkey(self.pk))
            channel.send_frame(MessageTag.ENC_ROUTE, serialize_enc_path(self.pk, self.enc_path))
            self.state = BobState.SENT_ROUTE
            metrics.setup_s += time.perf_counter() - start

            start = time.perf_counter()
            self.state = BobState.SERVING
            serve_requests(ctx, self.sk)
            metrics.compare_s = time.perf_counter() - start
            self.state = BobState.DONE
        except ProtocolError as e:
            logger.error(f"Bob aborting session in state {self.state.value}: {e}")
            channel.close()
            raise
        metrics.bytes_out, metrics.bytes_in = channel.bytes_out, channel.bytes_in
        metrics.mult_calls, metrics.sign_calls = ctx.mult_calls, ctx.sign_calls
        logger.info(f"Bob served {ctx.subprotocol_calls} rounds, {channel.bytes_total} bytes")
        return metrics


class AliceSession:
    """Requester. Holds Bob's public key and encrypted route, never his private key."""

    def __init__(self, path: Path, rng: Optional[Randomness] = None, t_max: int = DEFAULT_T_MAX):
        self.path = path
        self.rng = rng or default_randomness()
        self.t_max = t_max
        self.peer_pk: Optional[PublicKey] = None
        self.peer_route: Optional[EncPath] = None
        self.collisions: Set[int] = set()

    def run(self, channel: CountedChannel) -> Tuple[Set[int], Metrics]:
        metrics = Metrics(role="alice")
        start = time.perf_counter()
        self.peer_pk = deserialize_pubkey(channel.expect(MessageTag.PUBKEY).payload)
        self.peer_route = deserialize_enc_path(self.peer_pk, channel.expect(MessageTag.ENC_ROUTE).payload)
        metrics.setup_s = time.perf_counter() - start
        logger.info(
            f"Received {self.peer_pk.bits}-bit key {self.peer_pk.key_id} and "
            f"{self.peer_route.segment_count}-segment encrypted route"
        )

        ctx = ProtocolCtx(self.peer_pk, channel, self.t_max, self.rng)
        start = time.perf_counter()
        self.collisions = compare_paths(ctx, self.path, self.peer_route)
        finish(ctx)
        metrics.compare_s = time.perf_counter() - start
        metrics.bytes_out, metrics.bytes_in = channel.bytes_out, channel.bytes_in
        metrics.mult_calls, metrics.sign_calls = ctx.mult_calls, ctx.sign_calls
        return self.collisions, metrics


def run_bob(
    channel: CountedChannel,
    keypair: KeyPair,
    path: Path,
    rng: Optional[Randomness] = None,
    t_max: int = DEFAULT_T_MAX,
) -> Metrics:
    """Serve one session as Bob on an accepted connection."""
    return BobSession(keypair, path, rng, t_max).run(channel)


def run_alice(
    channel: CountedChannel,
    path: Path,
    rng: Optional[Randomness] = None,
    t_max: int = DEFAULT_T_MAX,
) -> Tuple[Set[int], Metrics]:
    """Run one session as Alice; returns her colliding segment indices and metrics."""
    return AliceSession(path, rng, t_max).run(channel)


@dataclass
class LoopbackResult:
    collisions: Set[int]
    alice: Metrics
    bob: Metrics
    alice_channel: CountedChannel
    bob_channel: CountedChannel

    @property
    def bytes_total(self) -> int:
        """Bytes both parties wrote to the stream."""
        return self.alice.bytes_out + self.bob.bytes_out


def run_loopback(
    alice_path: Path,
    bob_path: Path,
    bob_keypair: KeyPair,
    rng: Optional[Randomness] = None,
    t_max: int = DEFAULT_T_MAX,
    bob_session: Optional[BobSession] = None,
) -> LoopbackResult:
    """Run a full session in-process: Bob on a background thread, Alice on this one."""
    alice_ch, bob_ch = CountedChannel.pair()
    bob = bob_session or BobSession(bob_keypair, bob_path, rng, t_max)
    try:
        with BackgroundParty(bob.run, bob_ch) as party:
            collisions, alice_metrics = run_alice(alice_ch, alice_path, rng, t_max)
        bob_metrics = party.result()
    finally:
        alice_ch.close()
        bob_ch.close()
    return LoopbackResult(collisions, alice_metrics, bob_metrics, alice_ch, bob_ch)


def run_role_swap(
    path_a: Path,
    path_b: Path,
    keypair_a: KeyPair,
    keypair_b: KeyPair,
    rng: Optional[Randomness] = None,
) -> Tuple[Set[int], Set[int]]:
    """
    Run the comparison twice with roles switched.

    Returns:
        (segments of path_a that collide, segments of path_b that collide)
    """
    first = run_loopback(path_a, path_b, keypair_b, rng)
    second = run_loopback(path_b, path_a, keypair_a, rng)
    return first.collisions, second.collisions


def audit_bob_inbound(channel: CountedChannel) -> None:
    """Raise if Bob's transcript shows an inbound frame outside the allowed set."""
    leaked = [t for t in channel.inbound_tags() if t not in BOB_INBOUND_TAGS]
    if leaked:
        raise ProtocolError(f"Bob received disallowed frames: {[t.name for t in leaked]}")
