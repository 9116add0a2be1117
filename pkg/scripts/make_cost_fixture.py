"""Write a position-resolved cost table shaped like a 35-qubit/128-shard benchmark.

Local positions cost about one unit with a mild stride-dependent ripple,
the first global position (exchange between sockets of one node) about 4
units, and the remaining global positions (between nodes) about 8 units.

    python scripts/make_cost_fixture.py tests/data/fig1_like_n35.csv
"""

import argparse
import math

import numpy as np

from shardsim.costmodel import TableCostModel, write_cost_table
from shardsim.layout import ShardConfig


def fig1_like_table(n: int = 35, k: int = 128) -> TableCostModel:
    cfg = ShardConfig(n, k)
    m = cfg.m
    one = np.empty(n)
    for p in range(n):
        if p < m:
            one[p] = 1.0 + 0.05 * math.sin(p) + (0.1 if p < 3 else 0.0)
        elif p == m:
            one[p] = 4.0
        else:
            one[p] = 8.0 + 0.2 * (p - m - 1)
    two = np.empty((n, n))
    for c in range(n):
        for t in range(n):
            # a global control halves the shards doing work
            two[c, t] = one[t] * (1.05 if c < m else 0.6)
    np.fill_diagonal(two, np.nan)
    swap = np.full((n, n), np.nan)
    for a in range(m):
        for b in range(m, n):
            swap[a, b] = swap[b, a] = 1.2 * one[b]
    return TableCostModel(cfg, one, two, swap, local_reorder_cost=1.5, global_reorder_cost=8.0)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("output")
    parser.add_argument("-n", type=int, default=35)
    parser.add_argument("-k", type=int, default=128)
    args = parser.parse_args()
    write_cost_table(fig1_like_table(args.n, args.k), args.output)


if __name__ == "__main__":
    main()
