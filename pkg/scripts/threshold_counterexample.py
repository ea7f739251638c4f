"""Show why the block threshold must leave out the interval just below the block.

With signature (0:[1,1], 1:[2,3], 2:[4,35]) and block boundaries 1 < 2 the
block is [4, 35].  A sum
that also counts [2, 3] exceeds 1, yet a complete least-effort load on J_0
alone ends at exactly 1, so an adversary confined to [0, 1] survives it.
The threshold that counts only the block's own intervals stays at 1 and
correctly rejects this block.
"""

from __future__ import annotations

import json
import sys

from omegalab.bounds import truncated_sums
from omegalab.games import hload_final, table_use
from omegalab.usefn import Signature, plan_threshold


def main() -> int:
    sig = Signature(((0, 1, 1), (1, 2, 3), (2, 4, 35)))
    n_e, n_next = 1, 2
    m = sig.interval(n_e)[1]
    sums = truncated_sums(sig, n_next)
    # S(n_next - n_e) reaches down into I_{n_e}; S(n_next - n_e - 1) stops at the block
    with_outside = sums[n_next - n_e].shift(-m)
    block_only = plan_threshold(sig, n_e, n_next)
    lo, hi = sig.interval(n_e + 1)[0], sig.interval(n_next)[1]
    final = hload_final(table_use(sig), (lo - 1, hi))
    print(json.dumps({
        "block": [lo, hi],
        "threshold_counting_outside_interval": str(with_outside),
        "block_only_threshold": str(block_only),
        "final_gamma_of_complete_load": str(final),
    }, indent=1))
    return 0 if with_outside > block_only == final else 1


if __name__ == "__main__":
    sys.exit(main())
