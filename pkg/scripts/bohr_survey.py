"""Survey random Bohr sets in Z/NZ: regularity rate, doubling ratios, and
how the 4^rank doubling constant compares with the arc-covering one."""

import argparse
from dataclasses import dataclass

import numpy as np

from ap3 import bohr
from ap3.groups import AmbientGroup


@dataclass
class Config:
    samples: int = 500
    max_N: int = 400
    seed: int = 0


def main(cfg: Config) -> None:
    rng = np.random.default_rng(cfg.seed)
    regular = above4 = 0
    worst4 = worst_cover = 0.0
    for _ in range(cfg.samples):
        N = int(rng.integers(5, cfg.max_N))
        rank = int(rng.integers(1, 4))
        B = bohr.bohr_build(AmbientGroup.cyclic(N), rng.integers(1, N, size=rank),
                            rng.uniform(0.05, 2, size=rank))
        regular += bool(bohr.regularity_check(B))
        for rho in (0.1, 0.25, 0.5, 1.0):
            ratio = B.size_at(2 * rho) / B.size_at(rho)
            above4 += ratio > 4**rank
            worst4 = max(worst4, ratio / 4**rank)
            worst_cover = max(worst_cover, ratio / bohr.doubling_factor(B, rho))
    print(f"regular: {regular}/{cfg.samples}")
    print(f"dilations above 4^rank: {above4}; worst ratio / 4^rank = {worst4:.3f}")
    print(f"worst ratio / covering factor = {worst_cover:.3f} (must be <= 1)")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--samples", type=int, default=Config.samples)
    p.add_argument("--max-N", type=int, default=Config.max_N)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(a.samples, a.max_N, a.seed))
