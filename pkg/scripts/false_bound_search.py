"""Search two-interval signatures for loads that end below the naive amplification bound.

Prints every counterexample found within the budget, not only the first.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass

from omegalab.games import false_bound, hload, table_use, two_interval_signatures


@dataclass
class Config:
    seed: int = 0
    budget: int = 2000
    limit: int = 10


def main(cfg: Config) -> int:
    rng = random.Random(cfg.seed)
    found = []
    for i in range(cfg.budget):
        sig, interval = two_interval_signatures(rng)
        gamma = hload(table_use(sig), interval, record=False).final.gamma
        bound = false_bound(sig.g, interval)
        if gamma < bound:
            found.append({"trial": i, "signature": sig.to_json(), "interval": list(interval),
                          "gamma": str(gamma), "bound": str(bound),
                          "ratio": float(gamma.to_fraction() / bound.to_fraction())})
            if len(found) >= cfg.limit:
                break
    print(json.dumps({"config": asdict(cfg), "counterexamples": found}, indent=1))
    return 0 if found else 1


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--seed", type=int, default=Config.seed)
    p.add_argument("--budget", type=int, default=Config.budget)
    p.add_argument("--limit", type=int, default=Config.limit)
    sys.exit(main(Config(**vars(p.parse_args()))))
