"""Growth of the slice-rank bound M(n) against the Hoeffding and optimised rates."""

import argparse
import math
from dataclasses import dataclass

from ap3 import slicerank


@dataclass
class Config:
    n_max: int = 1000
    every: int = 50


def main(cfg: Config) -> None:
    rate, x = slicerank.eg_rate_constant()
    print(f"# optimised rate {rate:.10f} at x = {x:.6f}; Hoeffding rate {slicerank.hoeffding_rate():.6f}")
    print("n,M(n)^(1/n),3-step ratio,log10 M(n),Hoeffding slack (nats)")
    rows = slicerank.rate_report(cfg.n_max + 3)
    by_n = {r.n: r for r in rows}
    for n in range(cfg.every, cfg.n_max + 1, cfg.every):
        r = by_n[n]
        step3 = math.exp((math.log(by_n[n + 3].bound) - math.log(r.bound)) / 3)
        slack = math.log(2 * 3 ** (n + 1)) - n / 18 - math.log(r.bound)
        print(f"{n},{r.root:.8f},{step3:.8f},{math.log10(r.bound):.3f},{slack:.3f}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-max", type=int, default=Config.n_max)
    p.add_argument("--every", type=int, default=Config.every)
    a = p.parse_args()
    main(Config(a.n_max, a.every))
