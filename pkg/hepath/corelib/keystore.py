"""
Key pair storage.

A key file is a JSON document holding the public modulus in the clear and the
prime factors either in the clear or AES-CBC encrypted under a key derived
from a passphrase.
"""

import base64
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

from Cryptodome.Cipher import AES
from Cryptodome.Hash import SHA256
from Cryptodome.Protocol.KDF import PBKDF2
from Cryptodome.Random import get_random_bytes
from Cryptodome.Util.Padding import pad, unpad

from .he_core import PrivateKey, PublicKey

logger = logging.getLogger(__name__)

PASSPHRASE_ENV = "HEPATH_KEY_PASSPHRASE"
KDF_ROUNDS = 200_000


def _derive_key(passphrase: str, salt: bytes) -> bytes:
    return PBKDF2(passphrase, salt, dkLen=32, count=KDF_ROUNDS, hmac_hash_module=SHA256)


def _seal(secret: Dict[str, str], passphrase: str) -> Dict[str, str]:
    salt = get_random_bytes(16)
    iv = get_random_bytes(16)
    cipher = AES.new(_derive_key(passphrase, salt), AES.MODE_CBC, iv)
    ct = cipher.encrypt(pad(json.dumps(secret).encode(), AES.block_size))
    return {
        "salt": base64.b64encode(salt).decode(),
        "iv": base64.b64encode(iv).decode(),
        "ciphertext": base64.b64encode(ct).decode(),
    }


def _unseal(sealed: Dict[str, str], passphrase: str) -> Dict[str, str]:
    salt = base64.b64decode(sealed["salt"])
    iv = base64.b64decode(sealed["iv"])
    cipher = AES.new(_derive_key(passphrase, salt), AES.MODE_CBC, iv)
    try:
        raw = unpad(cipher.decrypt(base64.b64decode(sealed["ciphertext"])), AES.block_size)
        return json.loads(raw)
    except (ValueError, json.JSONDecodeError) as e:
        raise ValueError("could not unseal private key (wrong passphrase?)") from e


def save_keypair(path: str, sk: PrivateKey, passphrase: Optional[str] = None) -> None:
    """
    Write a key pair to ``path``.

    Args:
        path: Destination file.
        sk: Private key (its public half is stored alongside).
        passphrase: Protects the prime factors; falls back to $HEPATH_KEY_PASSPHRASE.
    """
    passphrase = passphrase or os.environ.get(PASSPHRASE_ENV)
    secret = {"p": format(sk.p, "x"), "q": format(sk.q, "x")}
    doc: Dict[str, Any] = {"n": format(sk.pk.n, "x"), "bits": sk.pk.bits, "key_id": sk.pk.key_id}
    if passphrase:
        doc["sealed"] = _seal(secret, passphrase)
    else:
        logger.warning(f"Writing unprotected private key to {path}")
        doc.update(secret)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)


def load_keypair(path: str, passphrase: Optional[str] = None) -> Tuple[PublicKey, PrivateKey]:
    """Read a key pair written by ``save_keypair``."""
    key_path = Path(path)
    if not key_path.exists():
        raise FileNotFoundError(f"Key file not found: {path}")
    with open(key_path, "r") as f:
        doc = json.load(f)
    if "sealed" in doc:
        passphrase = passphrase or os.environ.get(PASSPHRASE_ENV)
        if not passphrase:
            raise ValueError(f"key file {path} is passphrase protected; set ${PASSPHRASE_ENV}")
        secret = _unseal(doc["sealed"], passphrase)
    else:
        secret = doc
    pk = PublicKey(int(doc["n"], 16))
    sk = PrivateKey(int(secret["p"], 16), int(secret["q"], 16), pk)
    logger.info(f"Loaded {pk.bits}-bit key {pk.key_id} from {path}")
    return pk, sk
