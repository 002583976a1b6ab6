"""Exact star discrepancy of small point sets and the probabilistic bound

    D*_N(X) <= c sqrt(d/N)  with probability >= 1 - gamma exp(-(1.6741 c^2 - 10.7042) d)

for D-gamma-negatively dependent random points.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import ROUND_CEILING, Decimal, localcontext
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded
from .geometry import PointSet, as_rational

BOUND_SLOPE = 1.6741
BOUND_OFFSET = 10.7042
DEFAULT_DISC_BUDGET = 10**8


def _critical_grid(p: PointSet):
    grids, ranks = [], []
    for i in range(p.d):
        vals = sorted({x[i] for x in p} | {1})
        pos = {v: r for r, v in enumerate(vals)}
        grids.append(vals)
        ranks.append([pos[x[i]] for x in p])
    return grids, np.array(ranks).T


def star_discrepancy_exact(p: PointSet, budget: int = DEFAULT_DISC_BUDGET):
    """``sup_a |#{x in [0,a)}/N - vol([0,a))|`` over anchored boxes.

    The supremum is attained on the critical grid (coordinate values plus 1)
    either by the half-open box at a grid corner or as the limit of boxes
    shrinking onto the closed box at that corner.  Counts come from a
    d-dimensional cumulative histogram of coordinate ranks.  For rational
    input the maximizing corners are re-evaluated exactly and a Fraction is
    returned; otherwise a float.
    """
    N, d = p.N, p.d
    grids, ranks = _critical_grid(p)
    shape = tuple(len(g) for g in grids)
    # each corner is one box evaluation (open and closed count together)
    if math.prod(shape) > budget:
        raise BudgetExceeded(f"{math.prod(shape)} grid corners exceed the budget {budget}")
    hist = np.zeros(shape, dtype=np.int64)
    np.add.at(hist, tuple(ranks.T), 1)
    closed = hist
    for ax in range(d):
        closed = closed.cumsum(axis=ax)
    # open count at corner g = closed count at g - 1 in every axis
    padded = np.pad(closed, [(1, 0)] * d)
    open_ = padded[tuple(slice(0, -1) for _ in range(d))]
    vol = np.ones(shape)
    for ax, g in enumerate(grids):
        s = [1] * d
        s[ax] = len(g)
        vol = vol * np.array([float(v) for v in g]).reshape(s)
    under = vol - open_ / N
    over = closed / N - vol
    local = np.maximum(under, over)
    best = float(local.max())
    if not p.is_exact:
        return best
    # exact re-evaluation of all near-maximal corners
    cand = np.argwhere(local >= best - 1e-9)
    out = Fraction(0)
    for g in cand:
        v = math.prod((grids[ax][g[ax]] for ax in range(d)), start=Fraction(1))
        g = tuple(g)
        out = max(out, v - Fraction(int(open_[g]), N), Fraction(int(closed[g]), N) - v)
    return out


def star_discrepancy_bruteforce(p: PointSet):
    """Reference: direct evaluation of every critical corner, no histogram."""
    grids, _ = _critical_grid(p)
    N = p.N
    pts = [tuple(as_rational(x) for x in pt) if p.is_exact else pt for pt in p]
    best = 0
    for corner in itertools.product(*grids):
        v = math.prod(corner, start=Fraction(1) if p.is_exact else 1.0)
        n_open = sum(all(x < c for x, c in zip(pt, corner)) for pt in pts)
        n_closed = sum(all(x <= c for x, c in zip(pt, corner)) for pt in pts)
        if p.is_exact:
            best = max(best, v - Fraction(n_open, N), Fraction(n_closed, N) - v)
        else:
            best = max(best, v - n_open / N, n_closed / N - v)
    return best


@dataclass(frozen=True)
class BoundParams:
    c: float
    d: int
    gamma_log: float = 0.0   # ln(gamma); gamma = e^d is gamma_log = d


def success_probability(bp: BoundParams) -> float:
    """``1 - gamma exp(-(1.6741 c^2 - 10.7042) d)``, clamped to [0, 1]."""
    expo = bp.gamma_log - (BOUND_SLOPE * bp.c**2 - BOUND_OFFSET) * bp.d
    if expo > 700:
        return 0.0
    return min(1.0, max(0.0, 1.0 - math.exp(expo)))


def min_constant(gamma_rate: float) -> float:
    """Smallest 4-decimal ``c`` with ``1.6741 c^2 - 10.7042 > gamma_rate``.

    ``gamma_rate = ln(gamma)/d``: 0 for Monte Carlo points, 1 for LHS.
    """
    if gamma_rate < 0:
        raise ValueError("gamma rate must be non-negative")
    with localcontext() as ctx:
        ctx.prec = 50
        slope, offset = Decimal("1.6741"), Decimal("10.7042")
        rate = Decimal(repr(float(gamma_rate)))
        c = ((offset + rate) / slope).sqrt()
        step = Decimal("0.0001")
        c = c.quantize(step, rounding=ROUND_CEILING)
        while slope * c * c - offset <= rate:
            c += step
        return float(c)


def gamma_log_for(kind: str, d: int) -> float:
    """ln(gamma) of the known D-family dependence constant of a model."""
    if kind == "mc":
        return 0.0
    if kind == "lhs":
        return float(d)
    raise ValueError(f"no known dependence constant for model {kind!r}")


@dataclass
class BoundCheck:
    c: float
    threshold: float
    fraction_within: float
    success_probability: float
    discrepancies: list

    @property
    def consistent(self) -> bool:
        return self.fraction_within >= self.success_probability


def bound_vs_empirical(model, c: float, seeds) -> BoundCheck:
    """Fraction of realizations with ``D* <= c sqrt(d/N)`` vs the guaranteed rate."""
    thr = c * math.sqrt(model.d / model.N)
    discs = [float(star_discrepancy_exact(model.sample(s))) for s in seeds]
    frac = sum(x <= thr for x in discs) / len(discs)
    sp = success_probability(BoundParams(c, model.d, gamma_log_for(model.kind, model.d)))
    return BoundCheck(c, thr, frac, sp, discs)
