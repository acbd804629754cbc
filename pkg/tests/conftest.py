import contextlib
from dataclasses import dataclass
from typing import Iterator

import pytest

from hepath.corelib import he_core
from hepath.corelib.randomness import SeededRandomness
from hepath.execution.loopback import BackgroundParty
from hepath.execution.subprotocols import ProtocolCtx, finish, serve_requests
from hepath.execution.wire import CountedChannel

TEST_KEY_BITS = 1024


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def keypair():
    """Shared 1024-bit test key from a seeded, explicitly insecure generator."""
    return he_core.keygen(TEST_KEY_BITS, SeededRandomness(20240501))


@pytest.fixture(scope="session")
def other_keypair():
    return he_core.keygen(TEST_KEY_BITS, SeededRandomness(20240502))


@pytest.fixture(scope="session")
def pk(keypair):
    return keypair[0]


@pytest.fixture(scope="session")
def sk(keypair):
    return keypair[1]


@pytest.fixture
def rng():
    return SeededRandomness(7)


@dataclass
class Loopback:
    alice: ProtocolCtx
    bob: ProtocolCtx


@contextlib.contextmanager
def responder(keypair, rng=None) -> Iterator[Loopback]:
    """Alice's context on this thread, Bob serving requests on a background thread."""
    pk, sk = keypair
    alice_ch, bob_ch = CountedChannel.pair()
    kwargs = {"rng": rng} if rng is not None else {}
    alice = ProtocolCtx(pk, alice_ch, **kwargs)
    bob = ProtocolCtx(pk, bob_ch, **kwargs)
    try:
        with BackgroundParty(lambda ch: serve_requests(bob, sk), bob_ch):
            yield Loopback(alice, bob)
            finish(alice)
    finally:
        alice_ch.close()
        bob_ch.close()


@pytest.fixture
def loopback(keypair):
    with responder(keypair) as lb:
        yield lb


@pytest.fixture
def ctx(loopback):
    return loopback.alice
