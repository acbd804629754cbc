"""
Raster probe: how much it costs a dishonest Alice to map Bob's route.

Alice replaces her route with closely spaced horizontal lines made of short
segments, serpentine-connected into one path, and runs the normal comparison.
Each colliding row segment reveals one (band, column) cell of Bob's route.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, IO, List, Optional, Tuple

from hepath.corelib import he_core
from hepath.corelib.geometry import Path, Point
from hepath.corelib.randomness import Randomness

from .session import KeyPair, run_loopback

logger = logging.getLogger(__name__)

SECONDS_PER_HOUR = 3600.0


@dataclass(frozen=True)
class ProbeConfig:
    """Area bounds and raster parameters of the probing path."""

    x_min: int
    y_min: int
    x_max: int
    y_max: int
    spacing: int
    segment_length: int
    key_bits: int = 1024

    def __post_init__(self) -> None:
        if self.x_max <= self.x_min or self.y_max < self.y_min:
            raise ValueError("probe area bounds are empty")
        if self.spacing <= 0 or self.segment_length <= 0:
            raise ValueError("spacing and segment_length must be positive")

    @property
    def width(self) -> int:
        return self.x_max - self.x_min

    @property
    def height(self) -> int:
        return self.y_max - self.y_min

    @property
    def bands(self) -> int:
        return max(1, math.ceil(self.height / self.spacing))

    @property
    def columns(self) -> int:
        return max(1, math.ceil(self.width / self.segment_length))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ProbeConfig":
        return cls(**{k: int(v) for k, v in data.items() if k in cls.__dataclass_fields__})


@dataclass(frozen=True)
class RasterPath:
    path: Path
    # Segment index -> (band, column); connector segments are absent.
    cells: Dict[int, Tuple[int, int]]


def raster_path(cfg: ProbeConfig) -> RasterPath:
    """Serpentine raster over the probe area, one horizontal line per band."""
    xs = [cfg.x_min + c * cfg.segment_length for c in range(cfg.columns)] + [cfg.x_max]
    points: List[Point] = []
    cells: Dict[int, Tuple[int, int]] = {}
    for band in range(cfg.bands):
        top = band * cfg.spacing
        y = cfg.y_min + top + min(cfg.spacing, cfg.height - top) // 2
        row = xs if band % 2 == 0 else xs[::-1]
        first_index = len(points)
        points.extend(Point(x, y) for x in row)
        for c in range(cfg.columns):
            column = c if band % 2 == 0 else cfg.columns - 1 - c
            cells[first_index + c] = (band, column)
    return RasterPath(Path(points), cells)


@dataclass
class ProbeReport:
    bands: int
    columns: int
    probe_segments: int
    bob_segments: int
    mult_calls: int
    sign_calls: int
    bytes_total: int
    compare_s: float
    cells_hit: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def subprotocol_calls(self) -> int:
        return self.mult_calls + self.sign_calls

    @property
    def pair_seconds(self) -> float:
        """Measured comparison cost per (probe segment, Bob segment) pair."""
        pairs = self.probe_segments * self.bob_segments
        return self.compare_s / pairs if pairs else 0.0

    def extrapolated_hours(self, area_m: float = 1000.0, spacing_m: float = 1.0, segment_length_m: float = 1.0) -> float:
        """Hours to rasterize a square area of side ``area_m`` at the measured per-pair cost."""
        bands = math.ceil(area_m / spacing_m)
        segments = bands * math.ceil(area_m / segment_length_m) + (bands - 1)
        return segments * self.bob_segments * self.pair_seconds / SECONDS_PER_HOUR

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["cells_hit"] = [list(c) for c in self.cells_hit]
        data["subprotocol_calls"] = self.subprotocol_calls
        data["pair_seconds"] = self.pair_seconds
        data["extrapolated_hours_1km2_1m"] = self.extrapolated_hours()
        return data

    def write_jsonl(self, stream: IO[str]) -> None:
        """A summary record followed by one record per reconstructed cell."""
        summary = self.to_dict()
        cells = summary.pop("cells_hit")
        stream.write(json.dumps({"record": "summary", **summary}) + "\n")
        for band, column in cells:
            stream.write(json.dumps({"record": "cell", "band": band, "column": column}) + "\n")


def brute_force_probe(
    cfg: ProbeConfig,
    bob_path: Path,
    keypair: Optional[KeyPair] = None,
    rng: Optional[Randomness] = None,
) -> ProbeReport:
    """Run the raster probe against Bob's route and report its cost and what it reveals."""
    raster = raster_path(cfg)
    keypair = keypair or he_core.keygen(cfg.key_bits, rng)
    logger.info(
        f"Probing {cfg.width}x{cfg.height} area: {cfg.bands} bands, "
        f"{raster.path.segment_count} probe segments vs {bob_path.segment_count} route segments"
    )
    result = run_loopback(raster.path, bob_path, keypair, rng)
    cells = sorted({raster.cells[i] for i in result.collisions if i in raster.cells})
    return ProbeReport(
        bands=cfg.bands,
        columns=cfg.columns,
        probe_segments=raster.path.segment_count,
        bob_segments=bob_path.segment_count,
        mult_calls=result.alice.mult_calls,
        sign_calls=result.alice.sign_calls,
        bytes_total=result.bytes_total,
        compare_s=result.alice.compare_s,
        cells_hit=cells,
    )
