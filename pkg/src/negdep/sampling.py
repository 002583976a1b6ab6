"""Monte Carlo points, Latin hypercube samples and small digital nets."""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .geometry import (ElementaryInterval, PointSet, cell_index, compositions,
                       enumerate_elementary_intervals, is_fair)
from .errors import BudgetExceeded
from .rng import stream

EXACT_DENOMINATOR = 2**53
DEFAULT_SEARCH_BUDGET = 10**6


class SearchExhausted(Exception):
    """No generator matrices in the search space give a net with these parameters."""


class SearchBudgetExceeded(BudgetExceeded):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % p for p in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class NetParams:
    """Parameters (b, t, m, d) of a (t,m,d)-net in base b."""

    b: int
    t: int
    m: int
    d: int

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("base must be >= 2")
        if self.t < 0 or self.m < self.t:
            raise ValueError("need 0 <= t <= m")
        if self.d < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def N(self) -> int:
        return self.b**self.m

    @property
    def order(self) -> int:
        return self.m - self.t


@dataclass(frozen=True)
class LhsRealization:
    """The permutations and uniforms behind one Latin hypercube sample.

    ``perms[j][n]`` is the cell of point ``n`` along axis ``j``;
    ``uniforms[n][j]`` its offset inside that cell.
    """

    perms: tuple
    uniforms: tuple

    @property
    def N(self) -> int:
        return len(self.uniforms)

    def cells(self, n: int) -> tuple:
        return tuple(p[n] for p in self.perms)

    def point(self, n: int) -> tuple:
        N = self.N
        return tuple((self.perms[j][n] + self.uniforms[n][j]) / N
                     for j in range(len(self.perms)))


def _uniforms(rng, shape, exact):
    if exact:
        raw = rng.integers(0, EXACT_DENOMINATOR, size=shape, dtype=np.uint64)
        return [[Fraction(int(v), EXACT_DENOMINATOR) for v in row] for row in raw]
    return rng.random(shape).tolist()


def gen_mc(d: int, N: int, seed: int, exact: bool = False) -> PointSet:
    """``N`` i.i.d. uniform points in ``[0,1)^d``."""
    if d < 1 or N < 1:
        raise ValueError("need d, N >= 1")
    rng = stream(seed, "mc", d, N)
    pts = _uniforms(rng, (N, d), exact)
    return PointSet(tuple(map(tuple, pts)), f"mc(d={d},N={N},seed={seed})")


def gen_lhs(d: int, N: int, seed: int, exact: bool = False):
    """Latin hypercube sample ``X[n,j] = (pi_j(n) + U[n,j]) / N``.

    Returns the point set together with its :class:`LhsRealization`.  With
    ``exact=True`` the uniforms are rationals with denominator 2**53.
    """
    if d < 1 or N < 1:
        raise ValueError("need d, N >= 1")
    perms = tuple(tuple(int(v) for v in stream(seed, "lhs-perm", d, N, j).permutation(N))
                  for j in range(d))
    us = _uniforms(stream(seed, "lhs-unif", d, N), (N, d), exact)
    real = LhsRealization(perms, tuple(map(tuple, us)))
    pts = tuple(real.point(n) for n in range(N))
    return PointSet(pts, f"lhs(d={d},N={N},seed={seed})"), real


# --- digital nets -----------------------------------------------------------

def digit_vector(n: int, b: int, m: int) -> tuple:
    """Base-b digits of ``n``, least significant first, padded to ``m``."""
    out = []
    for _ in range(m):
        n, r = divmod(n, b)
        out.append(r)
    return tuple(out)


def _coordinate(mat, a, b, m):
    num = 0
    for row in mat:
        num = num * b + sum(c * x for c, x in zip(row, a)) % b
    return Fraction(num, b**m)


def net_from_matrices(params: NetParams, mats) -> PointSet:
    """Digital net: coordinate j of point n has digits ``C_j @ digits(n) mod b``."""
    b, m = params.b, params.m
    if not is_prime(b):
        raise ValueError("digital construction needs a prime base")
    if len(mats) != params.d:
        raise ValueError(f"expected {params.d} matrices, got {len(mats)}")
    for C in mats:
        if len(C) != m or any(len(row) != m for row in C):
            raise ValueError(f"generator matrices must be {m}x{m}")
    pts = []
    for n in range(params.N):
        a = digit_vector(n, b, m)
        pts.append(tuple(_coordinate(C, a, b, m) for C in mats))
    return PointSet(tuple(pts), f"digital-net(b={b},t={params.t},m={m},d={params.d})")


@dataclass
class NetReport:
    ok: bool
    checked: int
    violations: list = field(default_factory=list)  # (ElementaryInterval, count)

    def __bool__(self):
        return self.ok


def _net_violations(points, b, order, target, d, stop_early=False):
    checked = 0
    bad = []
    for levels in compositions(order, d):
        qs = [b**l for l in levels]
        counts = Counter(tuple(cell_index(x[i], qs[i]) for i in range(d)) for x in points)
        for idx in itertools.product(*(range(q) for q in qs)):
            checked += 1
            c = counts.get(idx, 0)
            if c != target:
                bad.append((ElementaryInterval(levels, idx, b), c))
                if stop_early:
                    return checked, bad
    return checked, bad


def verify_net(p: PointSet, params: NetParams) -> NetReport:
    """Check that every elementary interval of order ``m - t`` holds ``b^t`` points."""
    if p.N != params.N:
        raise ValueError(f"a net with these parameters has {params.N} points, got {p.N}")
    if p.d != params.d:
        raise ValueError("dimension mismatch")
    checked, bad = _net_violations(p.points, params.b, params.order, params.b**params.t, p.d)
    return NetReport(not bad, checked, bad)


def verify_net_bruteforce(p: PointSet, params: NetParams) -> bool:
    """Reference check via explicit interval enumeration and fairness."""
    return all(is_fair(p, e)
               for e in enumerate_elementary_intervals(params.b, params.order, params.d))


def _all_matrices(b, m):
    # lexicographic in the row-major flattening, first entry most significant
    for flat in itertools.product(range(b), repeat=m * m):
        yield tuple(tuple(flat[r * m:(r + 1) * m]) for r in range(m))


def search_net_matrices(params: NetParams, nth: int = 0,
                        budget: int = DEFAULT_SEARCH_BUDGET):
    """Lexicographically first generator matrices giving a (t,m,d)-net.

    The search runs depth-first over coordinates and prunes any prefix whose
    projection is not already a net (projections of nets are nets), which
    preserves the lexicographic order of hits.  ``nth`` skips the first
    ``nth`` hits, giving access to alternative nets.
    """
    b, m, d = params.b, params.m, params.d
    if not is_prime(b):
        raise ValueError("digital construction needs a prime base")
    mats = list(_all_matrices(b, m))
    digits = [digit_vector(n, b, m) for n in range(params.N)]
    columns = {C: [_coordinate(C, a, b, m) for a in digits] for C in mats}
    target = b**params.t
    order = params.order
    state = {"evals": 0, "skip": nth}

    def ok(prefix):
        state["evals"] += 1
        if state["evals"] > budget:
            raise SearchBudgetExceeded(f"net search exceeded {budget} checks")
        k = len(prefix)
        pts = list(zip(*(columns[C] for C in prefix)))
        _, bad = _net_violations(pts, b, order, target, k, stop_early=True)
        return not bad

    def dfs(prefix):
        if len(prefix) == d:
            if state["skip"] == 0:
                return tuple(prefix)
            state["skip"] -= 1
            return None
        for C in mats:
            prefix.append(C)
            if ok(prefix):
                found = dfs(prefix)
                if found is not None:
                    return found
            prefix.pop()
        return None

    found = dfs([])
    if found is None:
        raise SearchExhausted(
            f"no digital ({params.t},{m},{d})-net in base {b}"
            + (f" beyond hit {nth}" if nth else ""))
    return found
