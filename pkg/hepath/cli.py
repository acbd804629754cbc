#!/usr/bin/env python3
"""
Command-line interface for hepath.

This module provides the main CLI entry point with subcommand support.
"""

import argparse
import logging
import os
import sys
from typing import List, Optional

from .commands import (
    alice_command,
    bench_command,
    bob_command,
    keygen_command,
    probe_command,
    sim_command,
)
from .utils import env_key_bits


# Options whose values may start with a dash, such as a negative coordinate bound.
DASH_VALUE_OPTIONS = ("--coord-range",)


def normalize_argv(argv: List[str]) -> List[str]:
    """Rewrite ``--coord-range -99:99`` as ``--coord-range=-99:99`` so argparse keeps the value."""
    out: List[str] = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in DASH_VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def _add_key_bits(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--key-bits",
        type=int,
        default=env_key_bits(),
        help="Key size in bits (default: $HEPATH_KEY_BITS or 2048)"
    )


def _add_seed(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--seed",
        type=int,
        help="Seed for reproducible runs (uses a NON-secure generator)"
    )


def _add_bob_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--listen", required=True, metavar="HOST:PORT", help="Address to accept Alice's connection on")
    p.add_argument("--path", required=True, metavar="FILE", help="Route file, one 'x,y' point per line")
    p.add_argument("--key-file", metavar="FILE", help="Key pair written by 'keygen' (default: generate a fresh key)")
    p.add_argument("--out", metavar="FILE", help="Write session metrics as JSON")
    _add_key_bits(p)


def _add_alice_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--connect", required=True, metavar="HOST:PORT", help="Bob's address")
    p.add_argument("--path", required=True, metavar="FILE", help="Route file, one 'x,y' point per line")
    p.add_argument("--out", metavar="FILE", help="Write collisions and metrics as JSON")


def create_parser() -> argparse.ArgumentParser:
    """Create the main argument parser with subcommands."""
    parser = argparse.ArgumentParser(
        prog="python -m hepath",
        description="hepath - private path intersection between two drones under homomorphic encryption",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python -m hepath keygen --out bob.key
  python -m hepath bob --listen 0.0.0.0:9000 --path bob.txt --key-file bob.key
  python -m hepath alice --connect 127.0.0.1:9000 --path alice.txt
  python -m hepath bench --trials 30 --coord-range -99:99 --out bench.json
  python -m hepath sim --config scenario.json --out trace.jsonl
  python -m hepath probe --config probe.json --path bob.txt
        """
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Debug logging (default level: $HEPATH_LOG_LEVEL or INFO)"
    )

    subparsers = parser.add_subparsers(
        dest="command",
        help="Available commands",
        required=True
    )

    bob_parser = subparsers.add_parser("bob", help="Serve one comparison as the key holder")
    _add_bob_args(bob_parser)

    alice_parser = subparsers.add_parser("alice", help="Compare your route against Bob's")
    _add_alice_args(alice_parser)

    # Single entry point for either role.
    run_parser = subparsers.add_parser("run", help="Run one protocol role (--role alice|bob)")
    run_parser.add_argument("--role", choices=["alice", "bob"], required=True)
    run_parser.add_argument("--listen", metavar="HOST:PORT")
    run_parser.add_argument("--connect", metavar="HOST:PORT")
    run_parser.add_argument("--path", required=True, metavar="FILE")
    run_parser.add_argument("--key-file", metavar="FILE")
    run_parser.add_argument("--out", metavar="FILE")
    _add_key_bits(run_parser)

    bench_parser = subparsers.add_parser("bench", help="Time random single-segment sessions over loopback")
    bench_parser.add_argument("--trials", type=int, default=30, help="Number of trials (default: 30)")
    bench_parser.add_argument(
        "--coord-range",
        default="-99:99",
        metavar="MIN:MAX",
        help="Coordinate bounds for random segments (default: -99:99)"
    )
    bench_parser.add_argument("--out", metavar="FILE", help="Write the JSON report")
    bench_parser.add_argument("--xlsx", metavar="FILE", help="Also export the report as a spreadsheet")
    _add_key_bits(bench_parser)
    _add_seed(bench_parser)

    sim_parser = subparsers.add_parser("sim", help="Run the flight simulation")
    sim_parser.add_argument(
        "--config",
        required=True,
        metavar="FILE",
        help="JSON scenario: {\"flight\": {...}, \"drones\": [{\"id\", \"speed\", \"path\"}, ...]}"
    )
    sim_parser.add_argument("--out", metavar="FILE", help="Write the trace as JSON lines (default: stdout)")
    _add_seed(sim_parser)

    probe_parser = subparsers.add_parser("probe", help="Measure a raster probe against a route")
    probe_parser.add_argument("--config", required=True, metavar="FILE", help="JSON probe area and raster parameters")
    probe_parser.add_argument("--path", required=True, metavar="FILE", help="Bob's route file")
    probe_parser.add_argument("--out", metavar="FILE", help="Write the report as JSON lines (default: stdout)")
    _add_seed(probe_parser)

    keygen_parser = subparsers.add_parser("keygen", help="Generate a key pair file")
    keygen_parser.add_argument("--out", required=True, metavar="FILE", help="Key file to write")
    keygen_parser.add_argument(
        "--passphrase-env",
        action="store_true",
        help="Protect the private factors with $HEPATH_KEY_PASSPHRASE"
    )
    _add_key_bits(keygen_parser)

    return parser


def configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else os.environ.get("HEPATH_LOG_LEVEL", "INFO").upper()
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


COMMANDS = {
    "bob": bob_command,
    "alice": alice_command,
    "bench": bench_command,
    "sim": sim_command,
    "probe": probe_command,
    "keygen": keygen_command,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI entry point; returns the process exit status."""
    parser = create_parser()
    args = parser.parse_args(normalize_argv(sys.argv[1:] if argv is None else list(argv)))
    configure_logging(args.verbose)

    command = args.role if args.command == "run" else args.command
    if command == "bob" and not getattr(args, "listen", None):
        parser.error("bob requires --listen HOST:PORT")
    if command == "alice" and not getattr(args, "connect", None):
        parser.error("alice requires --connect HOST:PORT")

    try:
        return COMMANDS[command](args)
    except Exception as e:
        print(f"❌ Error executing command '{command}': {e}", file=sys.stderr)
        logging.getLogger(__name__).debug("command failed", exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
