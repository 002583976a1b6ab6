"""ratio/sqrt(d) for the LHS lower-bound set as d grows, for several eps.

Shows that the factor T(eps, d) only approaches 1 once eps is well below
1/d^2, so a fixed eps eventually drags the scaled ratio below its limit.
"""

import argparse
import math
from dataclasses import dataclass, field
from fractions import Fraction

from negdep.dependence import lhs_ratio_analytic
from negdep.repro import ASYMPTOTIC_CONSTANT


@dataclass
class ScalingConfig:
    dims: list = field(default_factory=lambda: [2, 5, 10, 20, 50, 100, 200, 500])
    eps_exponents: list = field(default_factory=lambda: [4, 6, 8, 10])


def main(cfg: ScalingConfig):
    print("d\teps\tratio/sqrt(d)\tlimit/sqrt(d)\tT\trel_gap")
    for d in cfg.dims:
        for k in cfg.eps_exponents:
            e = Fraction(1, 10**k)
            if e >= Fraction(1, d):
                continue
            t = lhs_ratio_analytic(d, e)
            scaled = t.ratio / math.sqrt(d)
            gap = scaled / ASYMPTOTIC_CONSTANT - 1
            print(f"{d}\t1e-{k}\t{scaled:.6f}\t{t.limit / math.sqrt(d):.6f}\t{t.T:.6f}\t{gap:+.4%}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+")
    a = ap.parse_args()
    main(ScalingConfig(dims=a.dims) if a.dims else ScalingConfig())
