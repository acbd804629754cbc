"""
Benchmark harness: random single-segment sessions over loopback, timed and
byte-counted, summarized next to published reference figures.
"""

import json
import logging
import random
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path as FilePath
from typing import Any, Dict, IO, List, Optional, Tuple

from hepath.corelib import he_core
from hepath.corelib.geometry import COORD_LIMIT, Path, Point
from hepath.corelib.randomness import Randomness, SeededRandomness
from hepath.execution.session import Metrics, run_loopback

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReferenceRow:
    approach: str
    time_s: float
    bytes_total: Optional[int]
    note: str = ""


REFERENCE_ROWS = (
    ReferenceRow("Paillier path intersection (published)", 4.407, 4634),
    ReferenceRow("Garbled circuits, Li et al. (published)", 6.092, 39221),
    ReferenceRow("Matrix MPC, Desai et al. (Pi-4 class)", 16.531, None, "96x96 matrix, 64-bit shares; 30 s reported"),
)

GARBLED_CIRCUIT_BYTES = 39221


@dataclass(frozen=True)
class BenchConfig:
    trials: int = 30
    coord_min: int = -99
    coord_max: int = 99
    key_bits: int = 2048
    seed: Optional[int] = None
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.coord_min > self.coord_max:
            raise ValueError("coord_min must not exceed coord_max")
        if abs(self.coord_min) >= COORD_LIMIT or abs(self.coord_max) >= COORD_LIMIT:
            raise ValueError(f"coordinate bounds must stay below 2^{he_core.COORD_BITS} in magnitude")


@dataclass
class TrialRecord:
    trial: int
    alice_segment: List[List[int]]
    bob_segment: List[List[int]]
    collides: bool
    setup_s: float
    compare_s: float
    bytes_total: int
    mult_calls: int
    sign_calls: int

    @property
    def wall_time_s(self) -> float:
        return self.setup_s + self.compare_s

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["wall_time_s"] = self.wall_time_s
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrialRecord":
        return cls(**{k: data[k] for k in cls.__dataclass_fields__})


@dataclass
class BenchReport:
    """
    Per-trial records plus the means derived from them.

    Key generation runs once per benchmark and is reported on its own
    (``keygen_s``); each trial's wall time is route encryption and transfer
    (``setup_s``) plus the segment comparison (``compare_s``).
    """

    config: Dict[str, Any]
    keygen_s: float
    trials: List[TrialRecord] = field(default_factory=list)

    def _mean(self, attr: str) -> float:
        return statistics.fmean(getattr(t, attr) for t in self.trials) if self.trials else 0.0

    @property
    def mean_wall_time_s(self) -> float:
        return self._mean("wall_time_s")

    @property
    def mean_setup_s(self) -> float:
        return self._mean("setup_s")

    @property
    def mean_compare_s(self) -> float:
        return self._mean("compare_s")

    @property
    def mean_bytes(self) -> float:
        return self._mean("bytes_total")

    def means(self) -> Dict[str, float]:
        return {
            "wall_time_s": self.mean_wall_time_s,
            "setup_s": self.mean_setup_s,
            "compare_s": self.mean_compare_s,
            "bytes_total": self.mean_bytes,
            "mult_calls": self._mean("mult_calls"),
            "sign_calls": self._mean("sign_calls"),
        }

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config,
            "keygen_s": self.keygen_s,
            "trials": [t.to_dict() for t in self.trials],
            "mean": self.means(),
            "reference": [asdict(r) for r in REFERENCE_ROWS],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BenchReport":
        return cls(
            config=data["config"],
            keygen_s=data["keygen_s"],
            trials=[TrialRecord.from_dict(t) for t in data["trials"]],
        )

    def save(self, file_path: str) -> None:
        FilePath(file_path).parent.mkdir(parents=True, exist_ok=True)
        with open(file_path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)
        logger.info(f"Saved benchmark report to {file_path}")

    @classmethod
    def load(cls, file_path: str) -> "BenchReport":
        with open(file_path, "r") as f:
            return cls.from_dict(json.load(f))

    def write_records(self, stream: IO[str]) -> None:
        """Line-delimited key=value records, one per trial, then one for the means."""
        for t in self.trials:
            stream.write(
                f"trial={t.trial} wall_time_s={t.wall_time_s:.4f} setup_s={t.setup_s:.4f} "
                f"compare_s={t.compare_s:.4f} bytes_total={t.bytes_total} "
                f"mult_calls={t.mult_calls} sign_calls={t.sign_calls} collides={int(t.collides)}\n"
            )
        m = self.means()
        stream.write(
            f"mean wall_time_s={m['wall_time_s']:.4f} setup_s={m['setup_s']:.4f} "
            f"compare_s={m['compare_s']:.4f} bytes_total={m['bytes_total']:.1f} keygen_s={self.keygen_s:.4f}\n"
        )

    def summary_table(self) -> str:
        rows: List[Tuple[str, str, str]] = [
            ("This run (mean)", f"{self.mean_wall_time_s:.3f}", f"{self.mean_bytes:.0f}")
        ]
        for r in REFERENCE_ROWS:
            rows.append((r.approach, f"{r.time_s:.3f}", str(r.bytes_total) if r.bytes_total is not None else "-"))
        width = max(len(r[0]) for r in rows)
        lines = [f"{'Approach':<{width}}  {'Time (s)':>9}  {'Bytes':>8}", "-" * (width + 21)]
        lines += [f"{a:<{width}}  {t:>9}  {b:>8}" for a, t, b in rows]
        return "\n".join(lines)

    def export_xlsx(self, file_path: str) -> bool:
        from hepath.corelib.workbook import write_tables

        trial_headers = ["trial", "wall_time_s", "setup_s", "compare_s", "bytes_total", "mult_calls", "sign_calls", "collides"]
        trial_rows = [
            [t.trial, t.wall_time_s, t.setup_s, t.compare_s, t.bytes_total, t.mult_calls, t.sign_calls, t.collides]
            for t in self.trials
        ]
        summary_rows: List[List[Any]] = [["This run (mean)", self.mean_wall_time_s, self.mean_bytes, ""]]
        summary_rows += [[r.approach, r.time_s, r.bytes_total, r.note] for r in REFERENCE_ROWS]
        return write_tables(
            file_path,
            {
                "Trials": (trial_headers, trial_rows),
                "Summary": (["approach", "time_s", "bytes_total", "note"], summary_rows),
            },
        )


def random_segment(gen: random.Random, low: int, high: int) -> Path:
    """A two-point path with both endpoints drawn uniformly from [low, high]^2."""
    return Path([Point(gen.randint(low, high), gen.randint(low, high)) for _ in range(2)])


def run_bench(cfg: BenchConfig, rng: Optional[Randomness] = None) -> BenchReport:
    """
    Run ``cfg.trials`` single-segment sessions against one freshly generated key.

    Segments come from ``random.Random(cfg.seed)``, so a fixed seed reproduces
    the segment pairs, the subprotocol call counts and the byte totals.
    """
    gen = random.Random(cfg.seed)
    if rng is None and cfg.seed is not None:
        rng = SeededRandomness(cfg.seed)

    start = time.perf_counter()
    keypair = he_core.keygen(cfg.key_bits, rng)
    keygen_s = time.perf_counter() - start
    logger.info(f"Generated {cfg.key_bits}-bit key in {keygen_s:.2f}s")

    report = BenchReport(config=asdict(cfg), keygen_s=keygen_s)
    for trial in range(cfg.trials):
        alice_path = random_segment(gen, cfg.coord_min, cfg.coord_max)
        bob_path = random_segment(gen, cfg.coord_min, cfg.coord_max)
        result = run_loopback(alice_path, bob_path, keypair, rng)
        alice: Metrics = result.alice
        bob: Metrics = result.bob
        record = TrialRecord(
            trial=trial,
            alice_segment=[list(p) for p in alice_path.to_pairs()],
            bob_segment=[list(p) for p in bob_path.to_pairs()],
            collides=bool(result.collisions),
            setup_s=max(alice.setup_s, bob.setup_s),
            compare_s=alice.compare_s,
            bytes_total=result.bytes_total,
            mult_calls=alice.mult_calls,
            sign_calls=alice.sign_calls,
        )
        report.trials.append(record)
        logger.debug(f"trial {trial}: {record.wall_time_s:.3f}s, {record.bytes_total} bytes")

    if report.mean_bytes >= GARBLED_CIRCUIT_BYTES:
        logger.warning(f"Mean traffic {report.mean_bytes:.0f} bytes exceeds the garbled-circuit reference")
    return report
