"""
hepath - private path intersection for drones under additively homomorphic encryption.

This package provides tools for:
- Paillier key generation, encryption and homomorphic arithmetic
- Blinded two-party multiplication and sign subprotocols
- Segment intersection evaluated against encrypted routes
- Alice/Bob sessions over a framed, byte-counted stream
- Flight simulation with altitude deconfliction and a raster probe analysis

Modules:
    corelib: Cryptosystem, randomness, key storage, plaintext geometry and spreadsheet export
    execution: Wire format, subprotocols, encrypted geometry, sessions, flight simulation, probe
    bench: Loopback benchmark harness
    utils: Path files and command-line value parsing
"""

__version__ = "0.1.0"

from . import corelib
from . import execution
from . import utils

__all__ = [
    "corelib",
    "execution",
    "utils",
]
