#!/usr/bin/env python3
"""Replay the 2x2 swap residual study and write the histogram.

Defaults match the desk-scale acceptance run: one million random stress
pencils, all three swapping methods, results to swap_benchmark.json.
"""

import sys

from poleswap.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or [
        "--trials", "1000000",
        "--seed", "20250",
        "--out", "swap_benchmark.json",
    ]
    raise SystemExit(main(["swap-bench", *argv]))
