"""Rewrite the golden outputs after an intended numerical change.

Run from the repository root: ``python3 tests/golden/regenerate.py``.
"""

import os
import sys

from freesd.cli import main

HERE = os.path.dirname(os.path.abspath(__file__))

CASES = [
    ("density", "symexp_small.json", "symexp_small.csv", []),
    ("density", "half_exp_small.json", "half_exp_small.csv", []),
    ("cumulants", "symexp_small.json", "cumulants_symexp.csv", ["--order", "8"]),
]

if __name__ == "__main__":
    for cmd, cfg, out, extra in CASES:
        code = main([cmd, "--config", os.path.join(HERE, cfg), "--out", os.path.join(HERE, out), *extra])
        if code:
            sys.exit(code)
