#!/usr/bin/env python3
"""
Command-line interface for hepath.

This module allows the hepath package to be executed as a command-line tool
using: python -m hepath

Usage:
    python -m hepath bob --listen HOST:PORT --path FILE     # Serve as Bob
    python -m hepath alice --connect HOST:PORT --path FILE  # Compare as Alice
    python -m hepath bench [options]                        # Benchmark
    python -m hepath --help                                 # Show help
"""

import sys
from .cli import main

if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nOperation cancelled by user.", file=sys.stderr)
        sys.exit(1)
