"""
Randomness sources for key generation, encryption and blinding.

Production code uses ``SystemRandomness`` (backed by Cryptodome's strong RNG).
``SeededRandomness`` exists for reproducible tests and benchmarks only; it is
not cryptographically secure and says so in the log when constructed.
"""

import logging
import random
from typing import Callable, Optional

from Cryptodome.Random import get_random_bytes
from Cryptodome.Random import random as strong_random

logger = logging.getLogger(__name__)


class Randomness:
    """Interface every randomness source implements."""

    secure: bool = False

    def randbytes(self, count: int) -> bytes:
        raise NotImplementedError

    def randbits(self, bits: int) -> int:
        raise NotImplementedError

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high], both ends inclusive."""
        raise NotImplementedError

    def randbelow(self, upper: int) -> int:
        """Uniform integer in [0, upper)."""
        return self.randint(0, upper - 1)

    def randbit(self) -> int:
        return self.randbits(1)

    @property
    def randfunc(self) -> Callable[[int], bytes]:
        """Byte source in the shape Cryptodome's prime generators expect."""
        return self.randbytes


class SystemRandomness(Randomness):
    """Cryptographically secure randomness from the operating system."""

    secure = True

    def randbytes(self, count: int) -> bytes:
        return get_random_bytes(count)

    def randbits(self, bits: int) -> int:
        return strong_random.getrandbits(bits)

    def randint(self, low: int, high: int) -> int:
        return strong_random.randint(low, high)


class SeededRandomness(Randomness):
    """
    Deterministic randomness for tests and reproducible runs.

    Args:
        seed: Seed for the underlying Mersenne Twister.

    Examples:
        >>> a, b = SeededRandomness(7), SeededRandomness(7)
        >>> a.randbits(64) == b.randbits(64)
        True
    """

    secure = False

    def __init__(self, seed: int):
        self.seed = seed
        self._random = random.Random(seed)
        logger.warning(f"Using seeded randomness (seed={seed}); NOT cryptographically secure")

    def randbytes(self, count: int) -> bytes:
        return self._random.getrandbits(count * 8).to_bytes(count, "big") if count else b""

    def randbits(self, bits: int) -> int:
        return self._random.getrandbits(bits)

    def randint(self, low: int, high: int) -> int:
        return self._random.randint(low, high)


_default: Optional[Randomness] = None


def default_randomness() -> Randomness:
    """Shared ``SystemRandomness`` instance used when callers pass no source."""
    global _default
    if _default is None:
        _default = SystemRandomness()
    return _default
