#!/usr/bin/env python3
"""Run the convergence-theorem verification suites on seeded random pencils.

Exit status 3 if any check misses its angle threshold.
"""

import sys

from poleswap.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:] or ["--seed", "20250", "--n", "8", "--trials", "100"]
    raise SystemExit(main(["verify", *argv]))
