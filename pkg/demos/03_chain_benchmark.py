"""Chains of rules joined by single bridge variables, beyond oracle reach.

For each model the three strategies are timed and the number of cube rows
folded while evaluating partition functions is counted. The counts are an
observation about cost, not a guarantee.
"""

import random
import time

from state_algebra import Row, compile_system, query
from state_algebra import distribution
from state_algebra.generators import chain_system

counter = {"rows": 0}
_original = distribution._disjoint_cells


def _counting(d):
    cells = _original(d)
    counter["rows"] += sum(len(c) for c, _ in cells)
    return cells


distribution._disjoint_cells = _counting

rng = random.Random(0)
print(f"{'k':>3} {'N':>3}  {'strategy':<10} {'P':>16} {'ms':>9} {'rows':>8}")
for k in (2, 4, 6, 8, 10):
    rs = chain_system(rng, k)
    d = compile_system(rs)
    e = Row.wild(rs.width)
    target = rs.width - 1
    for strategy in ("direct", "blanket", "separator"):
        counter["rows"] = 0
        t0 = time.perf_counter()
        res = query(d, e, target, strategy)
        ms = (time.perf_counter() - t0) * 1e3
        print(f"{k:>3} {rs.width:>3}  {strategy:<10} {res.probability:>16.12f} {ms:>9.2f} {counter['rows']:>8}")
