#!/usr/bin/env python3
"""Write a random dense complex matrix pair in the solver's file format.

Usage: make_example_pair.py [n] [seed] [out.json]
"""

import sys

import numpy as np

from poleswap.pencil import save_pencil

if __name__ == "__main__":
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 8
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 0
    out = sys.argv[3] if len(sys.argv) > 3 else "pair.json"
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    save_pencil(out, a, b)
    print(f"wrote {out} (n={n}, seed={seed})")
