"""
Discrete-time flight simulation with altitude deconfliction.

Drones fly their paths at constant speed. When two drones come within the
protocol initiation range, the one with the smaller id becomes Alice, runs the
encrypted comparison against the other's route, and from then on flies every
colliding segment above the default altitude, returning to it elsewhere. Bob's
flight is never modified by the encounter.

With two drones the raised level is default_altitude + avoid_delta. With more,
a drone that is itself raised against others can be someone's Bob, so levels
stack along the id order: on a colliding segment Alice flies one avoid_delta
above the highest level any of her Bobs plans anywhere on its route. Every pair
that ran the protocol is then separated by at least avoid_delta.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, IO, List, Optional, Sequence, Set, Tuple, Union

from hepath.corelib import he_core
from hepath.corelib.geometry import Path
from hepath.corelib.randomness import Randomness

from .session import KeyPair, run_loopback

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FlightConfig:
    """
    Args:
        initiation_range: Distance at which two drones start the protocol.
        default_altitude: Regulation cruising altitude.
        avoid_delta: Altitude step between flight levels; Alice climbs at least
            this much on colliding segments.
        dt: Requested tick length; shortened so no drone moves more than half
            the initiation range per tick.
        max_ticks: Hard stop for the simulation loop.
        key_bits: Size of keys generated for drones without one.
    """

    initiation_range: float = 50.0
    default_altitude: float = 100.0
    avoid_delta: float = 20.0
    dt: float = 1.0
    max_ticks: int = 100_000
    key_bits: int = 1024

    def __post_init__(self) -> None:
        if self.avoid_delta <= 0:
            raise ValueError("avoid_delta must be positive")
        if self.initiation_range <= 0:
            raise ValueError("initiation_range must be positive")
        if self.dt <= 0:
            raise ValueError("dt must be positive")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FlightConfig":
        known = {k: v for k, v in data.items() if k in cls.__dataclass_fields__}
        return cls(**known)


@dataclass(frozen=True)
class DroneSpec:
    drone_id: str
    path: Path
    speed: float

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise ValueError(f"drone {self.drone_id}: speed must be positive")


@dataclass
class TraceRecord:
    tick: int
    drone_id: str
    x: float
    y: float
    altitude: float
    event: str


@dataclass
class Encounter:
    tick: int
    alice: str
    bob: str
    collisions: List[int]
    bytes_total: int


@dataclass
class TraceLog:
    dt: float
    records: List[TraceRecord] = field(default_factory=list)
    encounters: List[Encounter] = field(default_factory=list)

    def for_drone(self, drone_id: str) -> List[TraceRecord]:
        return [r for r in self.records if r.drone_id == drone_id]

    def final_altitudes(self) -> Dict[str, float]:
        out: Dict[str, float] = {}
        for r in self.records:
            out[r.drone_id] = r.altitude
        return out

    def write_jsonl(self, stream: IO[str]) -> None:
        """One JSON object per line: tick, drone_id, x, y, altitude, event."""
        for r in self.records:
            stream.write(json.dumps(asdict(r)) + "\n")

    def save(self, path: str) -> None:
        with open(path, "w") as f:
            self.write_jsonl(f)


class _Drone:
    def __init__(self, spec: DroneSpec, altitude: float):
        self.spec = spec
        self.points = [(float(p.x), float(p.y)) for p in spec.path.points]
        self.lengths = [math.dist(a, b) for a, b in zip(self.points, self.points[1:])]
        self.segment = 0
        self.offset = 0.0
        self.altitude = altitude
        # colliding segment -> ids of the Bobs it collides with
        self.avoid: Dict[int, Set[str]] = {}
        self.done = len(self.points) < 2
        self.landed_logged = False

    @property
    def drone_id(self) -> str:
        return self.spec.drone_id

    @property
    def position(self) -> Tuple[float, float]:
        if self.done:
            return self.points[-1]
        (x0, y0), (x1, y1) = self.points[self.segment], self.points[self.segment + 1]
        length = self.lengths[self.segment]
        f = self.offset / length if length else 1.0
        return x0 + (x1 - x0) * f, y0 + (y1 - y0) * f

    def advance(self, distance: float) -> None:
        while not self.done and distance > 0:
            remaining = self.lengths[self.segment] - self.offset
            if distance < remaining:
                self.offset += distance
                return
            distance -= remaining
            self.segment += 1
            self.offset = 0.0
            if self.segment >= len(self.lengths):
                self.done = True


def _as_specs(drones: Sequence[Union[DroneSpec, Tuple[Path, float]]]) -> List[DroneSpec]:
    specs = []
    for i, d in enumerate(drones):
        specs.append(d if isinstance(d, DroneSpec) else DroneSpec(f"drone-{i}", d[0], d[1]))
    ids = [s.drone_id for s in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("drone ids must be unique")
    return specs


def _flight_levels(fleet: Sequence[_Drone]) -> Dict[str, Dict[int, int]]:
    """Per drone, the level (in avoid_delta steps) of each colliding segment."""
    levels: Dict[str, Dict[int, int]] = {}
    peak: Dict[str, int] = {}
    # Bobs always have larger ids than their Alice.
    for d in sorted(fleet, key=lambda d: d.drone_id, reverse=True):
        plan = {s: 1 + max(peak[b] for b in bobs) for s, bobs in d.avoid.items()}
        levels[d.drone_id] = plan
        peak[d.drone_id] = max(plan.values(), default=0)
    return levels


def effective_dt(specs: Sequence[DroneSpec], cfg: FlightConfig) -> float:
    """Tick length such that no drone covers more than half the initiation range per tick."""
    fastest = max(s.speed for s in specs)
    return min(cfg.dt, cfg.initiation_range / (2 * fastest))


def flight_sim(
    drones: Sequence[Union[DroneSpec, Tuple[Path, float]]],
    cfg: FlightConfig,
    keypairs: Optional[Dict[str, KeyPair]] = None,
    rng: Optional[Randomness] = None,
) -> TraceLog:
    """
    Simulate the drones until all have finished their paths.

    Args:
        drones: ``DroneSpec`` entries or (path, speed) tuples (ids assigned as drone-0, drone-1, ...).
        cfg: Flight configuration.
        keypairs: Per-drone key pairs; missing ones are generated with ``cfg.key_bits``.
        rng: Randomness for key generation and the protocol.

    Returns:
        The trace of every drone at every tick plus the encounters that ran.
    """
    specs = _as_specs(drones)
    if not specs:
        return TraceLog(dt=cfg.dt)
    keypairs = dict(keypairs or {})
    dt = effective_dt(specs, cfg)
    fleet = sorted((_Drone(s, cfg.default_altitude) for s in specs), key=lambda d: d.drone_id)
    trace = TraceLog(dt=dt)
    met: Set[Tuple[str, str]] = set()

    for tick in range(cfg.max_ticks):
        if all(d.done and d.landed_logged for d in fleet):
            break
        events: Dict[str, str] = {}

        for i, alice in enumerate(fleet):
            for bob in fleet[i + 1:]:
                if (alice.drone_id, bob.drone_id) in met or alice.done or bob.done:
                    continue
                if math.dist(alice.position, bob.position) > cfg.initiation_range:
                    continue
                met.add((alice.drone_id, bob.drone_id))
                if bob.drone_id not in keypairs:
                    keypairs[bob.drone_id] = he_core.keygen(cfg.key_bits, rng)
                result = run_loopback(alice.spec.path, bob.spec.path, keypairs[bob.drone_id], rng)
                for s in result.collisions:
                    alice.avoid.setdefault(s, set()).add(bob.drone_id)
                trace.encounters.append(
                    Encounter(tick, alice.drone_id, bob.drone_id, sorted(result.collisions), result.bytes_total)
                )
                events[alice.drone_id] = events[bob.drone_id] = "encounter"
                logger.info(
                    f"tick {tick}: {alice.drone_id} (alice) vs {bob.drone_id} (bob), "
                    f"colliding segments {sorted(result.collisions)}"
                )

        levels = _flight_levels(fleet)
        for d in fleet:
            if d.done:
                if d.landed_logged:
                    continue
                d.altitude = cfg.default_altitude
                d.landed_logged = True
                event = "landed"
            else:
                target = cfg.default_altitude + cfg.avoid_delta * levels[d.drone_id].get(d.segment, 0)
                event = events.get(d.drone_id, "cruise")
                if target > d.altitude:
                    event = "climb"
                elif target < d.altitude:
                    event = "descend"
                d.altitude = target
            x, y = d.position
            trace.records.append(TraceRecord(tick, d.drone_id, x, y, d.altitude, event))

        for d in fleet:
            d.advance(d.spec.speed * dt)
    else:
        logger.warning(f"Simulation stopped at max_ticks={cfg.max_ticks}")
    return trace


def deconfliction_violations(trace: TraceLog, radius: float, avoid_delta: float) -> List[Tuple[int, str, str]]:
    """
    Ticks where two airborne drones that already ran the protocol are within
    ``radius`` of each other without being separated by at least ``avoid_delta``.
    """
    met: Dict[Tuple[str, str], int] = {}
    for e in trace.encounters:
        met[tuple(sorted((e.alice, e.bob)))] = e.tick  # type: ignore[index]
    by_tick: Dict[int, List[TraceRecord]] = {}
    for r in trace.records:
        if r.event != "landed":
            by_tick.setdefault(r.tick, []).append(r)
    violations = []
    for tick, rows in sorted(by_tick.items()):
        for i, a in enumerate(rows):
            for b in rows[i + 1:]:
                since = met.get(tuple(sorted((a.drone_id, b.drone_id))))  # type: ignore[arg-type]
                if since is None or tick < since:
                    continue
                separation = abs(a.altitude - b.altitude)
                if math.dist((a.x, a.y), (b.x, b.y)) <= radius and not (
                    separation > avoid_delta or math.isclose(separation, avoid_delta)
                ):
                    violations.append((tick, a.drone_id, b.drone_id))
    return violations


def load_drones(data: Sequence[Dict[str, Any]]) -> List[DroneSpec]:
    """Build drone specs from JSON entries: {"id": ..., "speed": ..., "path": [[x, y], ...]}."""
    return [DroneSpec(str(d["id"]), Path.from_pairs([tuple(p) for p in d["path"]]), float(d["speed"])) for d in data]
