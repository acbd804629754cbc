"""
Core library: the cryptosystem and the plaintext geometry everything else builds on.
"""

from .he_core import (
    Ciphertext,
    KeyMismatchError,
    PrivateKey,
    PublicKey,
    SignedCoord,
    add,
    add_plain,
    decode,
    decrypt,
    decrypt_signed,
    encode,
    encrypt,
    encrypt_signed,
    keygen,
    negate,
    rerandomize,
    scalar_mul,
)
from .geometry import (
    EncPath,
    EncPoint,
    EncSegment,
    Orientation,
    Path,
    Point,
    Segment,
    compare_paths_plain,
    intersect_plain,
    on_segment_plain,
    orientation_plain,
)
from .randomness import Randomness, SeededRandomness, SystemRandomness, default_randomness
