#!/usr/bin/env python3
"""
Command implementations for the hepath CLI.

Every command takes the parsed arguments and returns a process exit status.
Results go to stdout; progress and diagnostics go to stderr.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, IO, Optional

from hepath.corelib import he_core
from hepath.corelib.keystore import PASSPHRASE_ENV, load_keypair, save_keypair
from hepath.corelib.randomness import Randomness, SeededRandomness
from hepath.execution.flight import FlightConfig, flight_sim, load_drones
from hepath.execution.probe import ProbeConfig, brute_force_probe
from hepath.execution.session import KeyPair, run_alice, run_bob
from hepath.execution.wire import CountedChannel, ProtocolError

from .bench import BenchConfig, run_bench
from .utils import load_json, load_path, parse_coord_range, parse_hostport

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_PROTOCOL = 2


def _status(message: str) -> None:
    print(message, file=sys.stderr)


def _rng(args: argparse.Namespace) -> Optional[Randomness]:
    seed = getattr(args, "seed", None)
    return SeededRandomness(seed) if seed is not None else None


def _write_json(path: str, data: Dict[str, Any]) -> None:
    with open(path, "w") as f:
        json.dump(data, f, indent=2)
    _status(f"💾 Saved to: {path}")


def _open_out(path: Optional[str]) -> IO[str]:
    return open(path, "w") if path else sys.stdout


def _bob_keypair(args: argparse.Namespace) -> KeyPair:
    if args.key_file:
        return load_keypair(args.key_file)
    _status(f"🔑 Generating {args.key_bits}-bit key...")
    return he_core.keygen(args.key_bits)


def bob_command(args: argparse.Namespace) -> int:
    """Serve one session as Bob."""
    _status("🛰️  hepath Bob")
    _status("=" * 40)
    path = load_path(args.path)
    keypair = _bob_keypair(args)
    host, port = parse_hostport(args.listen)
    _status(f"⏳ Awaiting a connection from Alice on {host}:{port}")
    try:
        with CountedChannel.accept_one(host, port) as channel:
            metrics = run_bob(channel, keypair, path)
    except ProtocolError as e:
        _status(f"❌ Protocol error: {e}")
        return EXIT_PROTOCOL
    _status(f"✅ Served {metrics.subprotocol_calls} subprotocol rounds")
    print(json.dumps(metrics.to_dict()))
    if args.out:
        _write_json(args.out, metrics.to_dict())
    return EXIT_OK


def alice_command(args: argparse.Namespace) -> int:
    """Connect to Bob and learn which of our segments collide with his route."""
    _status("🛩️  hepath Alice")
    _status("=" * 40)
    path = load_path(args.path)
    host, port = parse_hostport(args.connect)
    _status(f"🔌 Connecting to {host}:{port}")
    try:
        with CountedChannel.connect(host, port) as channel:
            collisions, metrics = run_alice(channel, path)
    except ProtocolError as e:
        _status(f"❌ Protocol error: {e}")
        return EXIT_PROTOCOL
    hits = sorted(collisions)
    if hits:
        _status(f"⚠️  {len(hits)} of {path.segment_count} segments collide")
    else:
        _status("✅ No colliding segments")
    print(json.dumps({"collisions": hits}))
    print(json.dumps(metrics.to_dict()))
    if args.out:
        _write_json(args.out, {"collisions": hits, "metrics": metrics.to_dict()})
    return EXIT_OK


def bench_command(args: argparse.Namespace) -> int:
    """Benchmark random single-segment sessions over loopback."""
    _status("⏱️  hepath Benchmark")
    _status("=" * 40)
    coord_min, coord_max = parse_coord_range(args.coord_range)
    cfg = BenchConfig(
        trials=args.trials,
        coord_min=coord_min,
        coord_max=coord_max,
        key_bits=args.key_bits,
        seed=args.seed,
        out=args.out,
    )
    _status(f"🏃 {cfg.trials} trials, {cfg.key_bits}-bit key, coordinates in [{coord_min}, {coord_max}]")
    report = run_bench(cfg)
    report.write_records(sys.stdout)
    print(report.summary_table())
    if cfg.out:
        report.save(cfg.out)
        _status(f"💾 Report saved to: {cfg.out}")
    if args.xlsx:
        if report.export_xlsx(args.xlsx):
            _status(f"📊 Spreadsheet saved to: {args.xlsx}")
        else:
            _status(f"⚠️  Could not write spreadsheet {args.xlsx}")
    return EXIT_OK


def sim_command(args: argparse.Namespace) -> int:
    """Run the flight simulation from a JSON scenario."""
    _status("🛫 hepath Flight Simulation")
    _status("=" * 40)
    scenario = load_json(args.config)
    cfg = FlightConfig.from_dict(scenario.get("flight", {}))
    drones = load_drones(scenario["drones"])
    _status(f"📝 {len(drones)} drones, initiation range {cfg.initiation_range}")
    trace = flight_sim(drones, cfg, rng=_rng(args))
    out = _open_out(args.out)
    try:
        trace.write_jsonl(out)
    finally:
        if out is not sys.stdout:
            out.close()
    _status(f"✅ {len(trace.encounters)} encounters over {len(trace.records)} trace records")
    return EXIT_OK


def probe_command(args: argparse.Namespace) -> int:
    """Measure what a raster probe costs and reveals about a route."""
    _status("🔍 hepath Probe")
    _status("=" * 40)
    cfg = ProbeConfig.from_dict(load_json(args.config))
    bob_path = load_path(args.path)
    report = brute_force_probe(cfg, bob_path, rng=_rng(args))
    out = _open_out(args.out)
    try:
        report.write_jsonl(out)
    finally:
        if out is not sys.stdout:
            out.close()
    _status(
        f"✅ {len(report.cells_hit)} cells revealed with {report.subprotocol_calls} rounds; "
        f"1 km² at 1 m would take ~{report.extrapolated_hours():.1f} h"
    )
    return EXIT_OK


def keygen_command(args: argparse.Namespace) -> int:
    """Generate a key pair file, optionally passphrase protected."""
    _status(f"🔑 Generating {args.key_bits}-bit key...")
    pk, sk = he_core.keygen(args.key_bits)
    passphrase = None
    if args.passphrase_env:
        passphrase = os.environ.get(PASSPHRASE_ENV)
        if not passphrase:
            _status(f"❌ --passphrase-env given but ${PASSPHRASE_ENV} is not set")
            return EXIT_ERROR
    save_keypair(args.out, sk, passphrase)
    _status(f"💾 Key {pk.key_id} saved to: {args.out}")
    return EXIT_OK
