"""Communicating-gate fractions before/after compilation, p=0.3.

Writes two CSVs: global fraction 10%..90% at n=50, and n=20..50 at a 1:5
global ratio.

    python scripts/fig3_sweeps.py --prefix fig3
"""

import argparse
import sys

from shardsim.cli import main

parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
parser.add_argument("--prefix", default="fig3")
parser.add_argument("--seeds", type=int, default=20)
parser.add_argument("--workers", type=int, default=1)
args = parser.parse_args()

common = ["-p", "0.3", "--seeds", str(args.seeds), "--workers", str(args.workers)]
code = main(["bench", "--sweep", "globalfrac", "-n", "50", *common, "-o", f"{args.prefix}_globalfrac.csv"])
code = code or main(["bench", "--sweep", "n", "--points", "20,25,30,35,40,45,50", "--global-ratio", "0.2",
                     *common, "-o", f"{args.prefix}_n.csv"])
sys.exit(code)
