import io
import json
import math
import random

import pytest

from hepath.corelib.geometry import Path, compare_paths_plain
from hepath.execution.flight import (
    DroneSpec,
    Encounter,
    FlightConfig,
    TraceLog,
    TraceRecord,
    deconfliction_violations,
    effective_dt,
    flight_sim,
    load_drones,
)

CFG = FlightConfig(initiation_range=50, default_altitude=100, avoid_delta=20, dt=1.0)


def _rounded(x, y):
    return int(round(x)), int(round(y))


def crossing_scenario(gen):
    """
    Alice flies a straight line through a crossing point X split into three
    segments, only the middle one containing X. Bob flies a single segment
    through X at an angle of 30 to 150 degrees, timed to arrive near X together.
    """
    speed = 5.0
    X = (gen.randint(-200, 200), gen.randint(-200, 200))
    heading = gen.uniform(0, 2 * math.pi)
    angle = math.radians(gen.uniform(30, 150)) * gen.choice((-1, 1))
    u = (math.cos(heading), math.sin(heading))
    v = (math.cos(heading + angle), math.sin(heading + angle))
    far, near = gen.uniform(120, 200), 30.0
    offset = gen.uniform(-speed, speed)
    alice = Path.from_pairs(
        [
            _rounded(X[0] - far * u[0], X[1] - far * u[1]),
            _rounded(X[0] - near * u[0], X[1] - near * u[1]),
            _rounded(X[0] + near * u[0], X[1] + near * u[1]),
            _rounded(X[0] + far * u[0], X[1] + far * u[1]),
        ]
    )
    bob_far = far + offset
    bob = Path.from_pairs(
        [
            _rounded(X[0] - bob_far * v[0], X[1] - bob_far * v[1]),
            _rounded(X[0] + bob_far * v[0], X[1] + bob_far * v[1]),
        ]
    )
    return [DroneSpec("a", alice, speed), DroneSpec("b", bob, speed)]


def test_config_validation():
    with pytest.raises(ValueError):
        FlightConfig(avoid_delta=0)
    with pytest.raises(ValueError):
        FlightConfig(initiation_range=-1)
    assert FlightConfig.from_dict({"avoid_delta": 5, "unknown": 1}).avoid_delta == 5


def test_effective_dt_limits_step():
    drones = [DroneSpec("a", Path.from_pairs([(0, 0), (1, 1)]), 100.0)]
    assert effective_dt(drones, CFG) == pytest.approx(0.25)
    assert effective_dt([DroneSpec("a", Path.from_pairs([(0, 0), (1, 1)]), 1.0)], CFG) == 1.0


def test_duplicate_ids_rejected(keypair):
    path = Path.from_pairs([(0, 0), (10, 0)])
    with pytest.raises(ValueError):
        flight_sim([DroneSpec("a", path, 1.0), DroneSpec("a", path, 1.0)], CFG)


def test_crossing_raises_alice_over_colliding_segment(keypair):
    drones = crossing_scenario(random.Random(51))
    trace = flight_sim(drones, CFG, keypairs={"a": keypair, "b": keypair})
    assert len(trace.encounters) == 1
    encounter = trace.encounters[0]
    assert (encounter.alice, encounter.bob) == ("a", "b")
    assert encounter.collisions == sorted(compare_paths_plain(drones[0].path, drones[1].path)) == [1]

    alice_rows = [r for r in trace.for_drone("a") if r.event != "landed"]
    raised = [r for r in alice_rows if r.altitude == CFG.default_altitude + CFG.avoid_delta]
    assert raised
    assert any(r.event == "climb" for r in alice_rows)
    assert any(r.event == "descend" for r in alice_rows)
    assert alice_rows[-1].altitude == CFG.default_altitude
    # Bob never deviates.
    assert {r.altitude for r in trace.for_drone("b")} == {CFG.default_altitude}
    assert set(trace.final_altitudes().values()) == {CFG.default_altitude}


def test_deconfliction_randomized_crossings(keypair):
    gen = random.Random(52)
    for _ in range(50):
        drones = crossing_scenario(gen)
        trace = flight_sim(drones, CFG, keypairs={"a": keypair, "b": keypair})
        radius = max(d.speed for d in drones) * trace.dt
        assert trace.encounters, "drones never came within range"
        assert deconfliction_violations(trace, radius, CFG.avoid_delta) == []
        assert {r.altitude for r in trace.records} <= {CFG.default_altitude, CFG.default_altitude + CFG.avoid_delta}
        assert set(trace.final_altitudes().values()) == {CFG.default_altitude}


def test_parallel_paths_no_altitude_change(keypair):
    drones = [
        DroneSpec("a", Path.from_pairs([(0, 0), (200, 0)]), 5.0),
        DroneSpec("b", Path.from_pairs([(0, 10), (200, 10)]), 5.0),
    ]
    trace = flight_sim(drones, CFG, keypairs={"a": keypair, "b": keypair})
    assert trace.encounters and trace.encounters[0].collisions == []
    assert {r.altitude for r in trace.records} == {CFG.default_altitude}


def test_overlapping_collinear_paths(keypair):
    path = Path.from_pairs([(0, 0), (50, 0), (100, 0), (150, 0)])
    drones = [DroneSpec("a", path, 5.0), DroneSpec("b", Path.from_pairs([(150, 0), (0, 0)]), 5.0)]
    trace = flight_sim(drones, CFG, keypairs={"a": keypair, "b": keypair})
    assert trace.encounters[0].collisions == [0, 1, 2]


def test_trace_records_are_json_lines(keypair):
    drones = [DroneSpec("a", Path.from_pairs([(0, 0), (10, 0)]), 5.0)]
    trace = flight_sim(drones, CFG)
    out = io.StringIO()
    trace.write_jsonl(out)
    rows = [json.loads(line) for line in out.getvalue().splitlines()]
    assert set(rows[0]) == {"tick", "drone_id", "x", "y", "altitude", "event"}
    assert rows[-1]["event"] == "landed"
    assert (rows[-1]["x"], rows[-1]["y"]) == (10.0, 0.0)


def test_load_drones():
    drones = load_drones([{"id": "d1", "speed": 3, "path": [[0, 0], [5, 5]]}])
    assert drones[0].drone_id == "d1"
    assert drones[0].path.segment_count == 1
    assert drones[0].speed == 3.0


def test_three_drones_through_one_point_stack_levels(keypair):
    # All three routes cross at X = (100, 100), each drone 100 units out at speed 5.
    drones = [
        DroneSpec("a", Path.from_pairs([(0, 100), (200, 100)]), 5.0),
        DroneSpec("b", Path.from_pairs([(100, 0), (100, 200)]), 5.0),
        DroneSpec("c", Path.from_pairs([(40, 20), (160, 180)]), 5.0),
    ]
    trace = flight_sim(drones, CFG, keypairs={d.drone_id: keypair for d in drones})
    assert [(e.alice, e.bob) for e in trace.encounters] == [("b", "c"), ("a", "c"), ("a", "b")]
    assert all(e.collisions == [0] for e in trace.encounters)

    at_x = {r.drone_id: r for r in trace.records if r.tick == 20}
    assert {d: (r.x, r.y) for d, r in at_x.items()} == {d: (100.0, 100.0) for d in "abc"}
    assert {d: r.altitude for d, r in at_x.items()} == {"a": 140.0, "b": 120.0, "c": 100.0}

    assert deconfliction_violations(trace, 5.0, CFG.avoid_delta) == []
    assert set(trace.final_altitudes().values()) == {CFG.default_altitude}


def test_deconfliction_violations_requires_min_separation():
    trace = TraceLog(dt=1.0, encounters=[Encounter(0, "a", "b", [0], 0), Encounter(0, "a", "c", [0], 0)])
    trace.records = [
        TraceRecord(1, "a", 0.0, 0.0, 120.0, "cruise"),
        TraceRecord(1, "b", 0.0, 0.0, 120.0, "cruise"),
        TraceRecord(1, "c", 0.0, 0.0, 80.0, "cruise"),
    ]
    assert deconfliction_violations(trace, 1.0, 20.0) == [(1, "a", "b")]
