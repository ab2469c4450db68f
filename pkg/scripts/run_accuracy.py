#!/usr/bin/env python3
"""Replay the 3x3 eigenvalue-accuracy study against the extended-precision
oracle and write the ratio summary to accuracy.json."""

import sys

from poleswap.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or [
        "--trials", "10000",
        "--seed", "20250",
        "--out", "accuracy.json",
    ]
    raise SystemExit(main(["accuracy", *argv]))
