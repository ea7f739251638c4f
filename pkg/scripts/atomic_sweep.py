"""Sweep the atomic load over an (n, k, c) grid and write one CSV row per game."""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

from omegalab.games import hload, offset_use, predict_atomic


@dataclass
class Config:
    n_max: int = 10
    k_max: int = 8
    c_max: int = 6
    out: str = "-"


def main(cfg: Config) -> int:
    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    w = csv.writer(fh)
    w.writerow(["n", "k", "c", "stages", "gamma", "binary", "predicted", "equal"])
    bad = 0
    for n in range(1, cfg.n_max + 1):
        for k in range(cfg.k_max + 1):
            for c in range(cfg.c_max + 1):
                final = hload(offset_use(c), (k, k + n), record=False).final
                want = predict_atomic(n, k, c)
                bad += final.gamma != want
                w.writerow([n, k, c, final.step, final.gamma, final.gamma.binary(), want, final.gamma == want])
    if fh is not sys.stdout:
        fh.close()
    print(f"{bad} mismatches", file=sys.stderr)
    return int(bad > 0)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f in ("n_max", "k_max", "c_max"):
        p.add_argument(f"--{f.replace('_', '-')}", dest=f, type=int, default=getattr(Config, f))
    p.add_argument("--out", default="-")
    sys.exit(main(Config(**vars(p.parse_args()))))
