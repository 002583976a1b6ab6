"""Dependence ratio as a function of eps for the lower-bound test sets.

Writes one TSV per target with the exact ratio, the closed form and the
limit value, showing how slowly the small-eps limits are approached.
"""

import argparse
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from negdep.dependence import (DependenceQuery, exact_joint_lhs, exact_joint_scrambled_net,
                               half_test_set, lhs_ratio_analytic, lhs_test_set,
                               lhs_vs_net_comparison, net_ratio_analytic)
from negdep.repro import LHS_D3_LIMIT, LHS_NET_LIMIT, NET_LIMIT, net_model


@dataclass
class CurveConfig:
    exponents: list = field(default_factory=lambda: list(range(1, 9)))
    out_dir: Path = Path("results")


def lhs_d3(e):
    r = exact_joint_lhs(DependenceQuery(lhs_test_set(3, e), {1, 2, 3}), 3, 3).ratio
    return r, lhs_ratio_analytic(3, e).ratio, LHS_D3_LIMIT


def net(e):
    r = exact_joint_scrambled_net(DependenceQuery(half_test_set(e), {1, 2, 3}),
                                  net_model("nested-uniform")).ratio
    return r, net_ratio_analytic(e), NET_LIMIT


def lhs_four(e):
    r = exact_joint_lhs(DependenceQuery(half_test_set(e), {1, 2, 3}), 3, 4).ratio
    return r, lhs_vs_net_comparison(e), LHS_NET_LIMIT


CURVES = {"lhs-d3": lhs_d3, "net-half-box": net, "lhs-four-points": lhs_four}


def main(cfg: CurveConfig):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for name, fn in CURVES.items():
        path = cfg.out_dir / f"ratio_curve_{name}.tsv"
        with open(path, "w") as fh:
            fh.write("eps\texact\tclosed_form\tlimit\trel_gap_to_limit\n")
            for k in cfg.exponents:
                e = Fraction(1, 10**k)
                exact, closed, limit = fn(e)
                gap = (float(exact) - float(limit)) / float(limit)
                fh.write(f"1e-{k}\t{float(exact):.12g}\t{float(closed):.12g}\t"
                         f"{float(limit):.12g}\t{gap:+.3e}\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-exponent", type=int, default=8)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    a = ap.parse_args()
    main(CurveConfig(list(range(1, a.max_exponent + 1)), a.out_dir))
