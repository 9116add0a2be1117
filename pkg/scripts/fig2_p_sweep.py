"""Estimated time reduction vs. CNOT probability (n=35, 7 global qubits).

    python scripts/fig2_p_sweep.py -o fig2.csv [--model table:tests/data/fig1_like_n35.csv]
"""

import argparse
import sys

from shardsim.cli import main

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("-o", "--output", default="fig2_p_sweep.csv")
parser.add_argument("--model", default="step:R=8")
parser.add_argument("--seeds", type=int, default=20)
parser.add_argument("--workers", type=int, default=1)
args = parser.parse_args()

sys.exit(main([
    "bench", "--sweep", "p", "-n", "35", "-k", "128", "--gates", "1050",
    "--seeds", str(args.seeds), "--model", args.model, "--workers", str(args.workers),
    "-o", args.output,
]))
