import json
import logging
import os
from pathlib import Path as FilePath
from typing import Any, Dict, List, Tuple

from hepath.corelib.geometry import COORD_LIMIT, Path, Point

logger = logging.getLogger(__name__)

DEFAULT_KEY_BITS = 2048


def env_key_bits() -> int:
    """Default key size, overridable through $HEPATH_KEY_BITS."""
    raw = os.environ.get("HEPATH_KEY_BITS")
    if not raw:
        return DEFAULT_KEY_BITS
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"HEPATH_KEY_BITS must be an integer, got {raw!r}") from None


def load_path(file: str) -> Path:
    """
    Load a path file: one ``x,y`` point per line, decimal integers.

    Blank lines and lines starting with ``#`` are skipped.

    Raises:
        FileNotFoundError: If the file does not exist.
        ValueError: On non-integer or out-of-bound coordinates, or an empty path.
    """
    path_file = FilePath(file)
    if not path_file.exists():
        raise FileNotFoundError(f"Path file not found: {file}")
    points: List[Point] = []
    with open(path_file, "r") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) != 2:
                raise ValueError(f"{file}:{lineno}: expected 'x,y', got {line!r}")
            try:
                x, y = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{file}:{lineno}: non-integer coordinate in {line!r}") from None
            if abs(x) >= COORD_LIMIT or abs(y) >= COORD_LIMIT:
                raise ValueError(f"{file}:{lineno}: coordinate out of bounds in {line!r}")
            points.append(Point(x, y))
    if not points:
        raise ValueError(f"{file}: a path needs at least one point")
    logger.debug(f"Loaded {len(points)} points from {file}")
    return Path(points)


def save_path(path: Path, file: str) -> None:
    """Write a path in the format ``load_path`` reads."""
    FilePath(file).parent.mkdir(parents=True, exist_ok=True)
    with open(file, "w") as f:
        for x, y in path.to_pairs():
            f.write(f"{x},{y}\n")


def parse_hostport(value: str) -> Tuple[str, int]:
    """Split ``HOST:PORT``; the host may be empty (all interfaces)."""
    host, sep, port = value.rpartition(":")
    if not sep:
        raise ValueError(f"expected HOST:PORT, got {value!r}")
    try:
        return host or "0.0.0.0", int(port)
    except ValueError:
        raise ValueError(f"invalid port in {value!r}") from None


def parse_coord_range(value: str) -> Tuple[int, int]:
    """Parse ``MIN:MAX`` (negative values allowed, e.g. ``-99:99``)."""
    lo, sep, hi = value.partition(":")
    if not sep:
        raise ValueError(f"expected MIN:MAX, got {value!r}")
    try:
        low, high = int(lo), int(hi)
    except ValueError:
        raise ValueError(f"invalid coordinate range {value!r}") from None
    if low > high:
        raise ValueError(f"empty coordinate range {value!r}")
    return low, high


def load_json(file: str) -> Dict[str, Any]:
    config_file = FilePath(file)
    if not config_file.exists():
        raise FileNotFoundError(f"Config file not found: {file}")
    with open(config_file, "r") as f:
        return json.load(f)
