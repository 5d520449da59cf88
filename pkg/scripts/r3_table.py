"""Tabulate r3(N) and r3(F_3^n) with witnesses, optionally filling a cache."""

import argparse
import csv
import sys
import time
from dataclasses import dataclass
from typing import Optional

from ap3 import extremal
from ap3.apsets import construct_digit


@dataclass
class Config:
    max_N: int = 40
    max_n: int = 3
    budget: int = extremal.DEFAULT_BUDGET
    cache: Optional[str] = None


def main(cfg: Config) -> None:
    out = csv.writer(sys.stdout)
    out.writerow(["problem", "size", "r3", "proof", "digit_lower_bound", "seconds", "witness"])
    for N in range(1, cfg.max_N + 1):
        t0 = time.perf_counter()
        rec = extremal.solve_integer(N, cfg.budget)
        dt = time.perf_counter() - t0
        out.writerow(["integer", N, rec.value, rec.proof, len(construct_digit(N)), f"{dt:.3f}",
                      " ".join(map(str, rec.witness.elements))])
        if cfg.cache:
            extremal.cache_put(cfg.cache, rec)
        if not rec.optimal:
            break
    for n in range(1, cfg.max_n + 1):
        t0 = time.perf_counter()
        rec = extremal.solve_vector(n, cfg.budget)
        dt = time.perf_counter() - t0
        out.writerow(["vector", n, rec.value, rec.proof, "", f"{dt:.3f}",
                      " ".join(map(str, rec.witness.elements))])
        if cfg.cache:
            extremal.cache_put(cfg.cache, rec)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--max-N", type=int, default=Config.max_N)
    p.add_argument("--max-n", type=int, default=Config.max_n)
    p.add_argument("--budget", type=int, default=Config.budget)
    p.add_argument("--cache")
    a = p.parse_args()
    main(Config(a.max_N, a.max_n, a.budget, a.cache))
