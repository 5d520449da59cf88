"""Run both density-increment drivers and print their certified traces."""

import argparse
from dataclasses import dataclass

from ap3 import apsets, extremal, increment


@dataclass
class Config:
    vector_budget: int = 200_000
    digit_powers: tuple = (6, 8, 9)


def show(title, trace) -> None:
    print(f"== {title}")
    for s in trace.steps:
        c = s.certificate
        extra = ""
        if c.branch == increment.INCREMENT:
            extra = f" -> density {c.achieved} on {c.structure} (floor {float(c.floor):.5f})"
        print(f"  level {s.level}: size {s.size}, density {s.density} [{c.branch}]{extra}")
    print(f"  verdict: {trace.verdict}")


def main(cfg: Config) -> None:
    for n in (3, 4):
        cap = extremal.solve_vector(n, cfg.vector_budget).witness
        show(f"cap set of size {len(cap)} in F_3^{n}", increment.meshulam_drive(cap))
    two = extremal.solve_vector(2).witness
    show("product lift in F_3^4", increment.meshulam_drive(apsets.product_lift(two, two)))
    for k in cfg.digit_powers:
        A = apsets.construct_digit(3**k)
        show(f"digit set in [3^{k}]", increment.roth_drive(A))


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--vector-budget", type=int, default=Config.vector_budget)
    p.add_argument("--digit-powers", type=int, nargs="+", default=list(Config.digit_powers))
    a = p.parse_args()
    main(Config(a.vector_budget, tuple(a.digit_powers)))
