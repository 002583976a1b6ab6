"""gamma-negative dependence of indicator variables ``1_S(X_1), ..., 1_S(X_N)``.

For a test set ``S`` and a non-empty index set ``J`` the *upper* ratio is

    P(X_j in S for all j in J) / prod_j P(X_j in S)

and the *lower* ratio uses the complement events ``X_j not in S``.  The
correlation number of a random point set is the supremum of both ratios over
all ``S`` in the family and all ``J``.

Exact probabilities are computed by conditioning on the discrete layer of the
model (LHS permutations, scrambling digit maps, labelings): given that layer
the points are independent and uniform in known cells, so the joint
probability is an average of products of exact cell overlaps.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np
from scipy import stats

from .errors import BudgetExceeded
from .geometry import ElementaryInterval, PointSet, TestSet, as_rational
from .rng import derive_seed, stream
from .sampling import NetParams, gen_lhs, gen_mc
from .scrambling import (ScramblingScheme, digits, draw_table, enumerate_tables,
                         scramble, DEFAULT_REALIZATION_CAP)

UPPER, LOWER = "upper", "lower"
DEFAULT_LHS_BUDGET = 10**7
CI_LEVEL = 0.99


@dataclass(frozen=True)
class DependenceQuery:
    test_set: TestSet
    J: frozenset  # 1-based point indices
    side: str = UPPER

    def __post_init__(self):
        J = frozenset(int(j) for j in self.J)
        if not J:
            raise ValueError("index set J must be non-empty")
        if min(J) < 1:
            raise ValueError("indices in J are 1-based")
        if self.side not in (UPPER, LOWER):
            raise ValueError(f"side must be {UPPER!r} or {LOWER!r}")
        object.__setattr__(self, "J", J)

    @property
    def k(self) -> int:
        return len(self.J)

    def event_probability(self, p):
        """Probability of the per-point event given membership probability ``p``."""
        return p if self.side == UPPER else 1 - p


def dependence_ratio(joint, product):
    """``joint / product`` with 0/0 -> 1 and positive/0 -> inf."""
    if product == 0:
        return Fraction(1) if joint == 0 else math.inf
    if isinstance(joint, Fraction) and isinstance(product, Fraction):
        return joint / product
    return float(joint) / float(product)


@dataclass(frozen=True)
class DependenceReport:
    joint: object
    product: object
    ratio: object
    mode: str = "exact"
    ci: tuple = None          # CI for the joint probability (estimated mode)
    ratio_ci: tuple = None
    reps: int = 0

    def line(self) -> str:
        def fmt(x):
            if isinstance(x, Fraction):
                return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
            return repr(float(x))
        s = f"joint={fmt(self.joint)} product={fmt(self.product)} ratio={fmt(self.ratio)}"
        if isinstance(self.ratio, Fraction) and self.ratio.denominator != 1:
            s += f" ratio~{float(self.ratio):.12g}"
        if self.ci is not None:
            s += f" ci={self.ci[0]!r},{self.ci[1]!r}"
        return s


@dataclass(frozen=True)
class RandomPointModel:
    """Joint law of a random point set, up to the seed."""

    kind: str                 # "mc", "lhs" or "scrambled-net"
    d: int
    N: int
    net: PointSet = None
    params: NetParams = None
    scheme: ScramblingScheme = None

    def __post_init__(self):
        if self.kind not in ("mc", "lhs", "scrambled-net"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "scrambled-net":
            if self.net is None or self.params is None or self.scheme is None:
                raise ValueError("scrambled-net models need net, params and scheme")
            if self.net.N != self.params.N or self.net.d != self.params.d:
                raise ValueError("net does not match its parameters")
            if self.scheme.base != self.params.b:
                raise ValueError("scheme base differs from net base")

    @classmethod
    def mc(cls, d, N):
        return cls("mc", d, N)

    @classmethod
    def lhs(cls, d, N):
        return cls("lhs", d, N)

    @classmethod
    def scrambled_net(cls, params: NetParams, net: PointSet, scheme: ScramblingScheme):
        return cls("scrambled-net", params.d, params.N, net, params, scheme)

    @property
    def exchangeable(self) -> bool:
        return self.kind != "scrambled-net" or self.scheme.symmetrize

    def sample(self, seed: int) -> PointSet:
        if self.kind == "mc":
            return gen_mc(self.d, self.N, seed)
        if self.kind == "lhs":
            return gen_lhs(self.d, self.N, seed)[0]
        return scramble(self.net, self.scheme.with_seed(seed))[0]


def _check_query(q: DependenceQuery, d: int, N: int):
    if q.test_set.d != d:
        raise ValueError(f"test set has dimension {q.test_set.d}, model has {d}")
    if max(q.J) > N:
        raise ValueError(f"J refers to point {max(q.J)} but N = {N}")


def gamma_AB(a, b, N: int) -> float:
    """Dependence constant for ``D = [0,b) \\ [0,a)`` under LHS with N points.

    Each coordinate contributes 1 if ``a_i = 0`` or both corners lie on the
    grid ``{1/N, ..., 1}``, and ``e`` otherwise.
    """
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    off = 0
    for ai, bi in zip(a, b):
        ai, bi = as_rational(ai), as_rational(bi)
        on_grid = all(x > 0 and (x * N).denominator == 1 for x in (ai, bi))
        if not (ai == 0 or on_grid):
            off += 1
    return math.exp(off)


def _clamp01(x: Fraction) -> Fraction:
    return min(max(x, Fraction(0)), Fraction(1))


def _falling(n: int, k: int) -> int:
    return math.prod(range(n - k + 1, n + 1))


def _product_of_marginals(q: DependenceQuery, vol: Fraction) -> Fraction:
    return q.event_probability(vol) ** q.k


def exact_joint_lhs(q: DependenceQuery, d: int, N: int,
                    budget: int = DEFAULT_LHS_BUDGET) -> DependenceReport:
    """Exact joint probability for a Latin hypercube sample.

    Given the cells of all points the points are independent, and the
    membership probability of a point in ``B \\ A`` is
    ``prod_i fB_i - prod_i fA_i`` with ``f_i`` the covered fraction of its
    cell along axis ``i``.  Cells along one axis are an exchangeable random
    injection of ``J`` into ``[0..N-1]``, so only the class of each cell
    (by its pair of covered fractions) matters; the state after each axis is
    the multiset of per-point partial products.
    """
    _check_query(q, d, N)
    S = q.test_set
    k = q.k
    outer = S.outer.upper
    inner = S.effective_inner.upper
    one = Fraction(1)
    states = {((one, one),) * k: one}
    work = 0
    total = _falling(N, k)
    for i in range(d):
        classes = Counter((_clamp01(N * outer[i] - c), _clamp01(N * inner[i] - c))
                          for c in range(N))
        vals = list(classes)
        sizes = [classes[v] for v in vals]
        moves = []
        for assign in itertools.product(range(len(vals)), repeat=k):
            cnt = Counter(assign)
            w = math.prod(_falling(sizes[c], n) for c, n in cnt.items())
            if w:
                moves.append((assign, Fraction(w, total)))
        work += len(states) * len(moves)
        if work > budget:
            raise BudgetExceeded(f"LHS enumeration exceeds budget {budget}")
        nxt = defaultdict(Fraction)
        for st, ps in states.items():
            for assign, w in moves:
                new = tuple(sorted((pb * vals[c][0], pa * vals[c][1])
                                   for (pb, pa), c in zip(st, assign)))
                nxt[new] += ps * w
        states = nxt
    joint = Fraction(0)
    for st, ps in states.items():
        joint += ps * math.prod((q.event_probability(pb - pa) for pb, pa in st), start=one)
    product = _product_of_marginals(q, S.volume())
    return DependenceReport(joint, product, dependence_ratio(joint, product))


def exact_joint_mc(q: DependenceQuery, d: int, N: int) -> DependenceReport:
    """Independent uniform points: joint equals product."""
    _check_query(q, d, N)
    product = _product_of_marginals(q, q.test_set.volume())
    return DependenceReport(product, product, dependence_ratio(product, product))


def _elementary_symmetric(xs, k):
    e = [Fraction(1)] + [Fraction(0)] * k
    for x in xs:
        for r in range(k, 0, -1):
            e[r] += e[r - 1] * x
    return e[k]


def coordinate_cell_distribution(scheme: ScramblingScheme, column,
                                 cap: int = DEFAULT_REALIZATION_CAP) -> dict:
    """Law of the scrambled depth-l cell indices of one coordinate column.

    Returns ``{(cell of point 0, cell of point 1, ...): probability}``.
    """
    b, depth = scheme.base, scheme.depth
    words = [digits(x, b, depth) for x in column]
    dist = defaultdict(Fraction)
    for p, table in enumerate_tables(scheme, set(words), cap):
        key = []
        for w in words:
            c = 0
            for dig in table(w):
                c = c * b + dig
            key.append(c)
        dist[tuple(key)] += p
    return dict(dist)


def exact_joint_scrambled_net(q: DependenceQuery, model: RandomPointModel,
                              cap: int = DEFAULT_REALIZATION_CAP) -> DependenceReport:
    """Exact joint probability for a scrambled net.

    Enumerates every digit-map realization of every coordinate; given a
    realization each point is uniform in its scrambled depth-l cell, so
    ``P(point in S | cell) = vol(S ∩ cell) / vol(cell)``.  Symmetrized
    schemes average over all labelings of ``J`` with distinct points.
    """
    if model.kind != "scrambled-net":
        raise ValueError("model is not a scrambled net")
    _check_query(q, model.d, model.N)
    scheme, net = model.scheme, model.net
    if scheme.shared_tail:
        raise ValueError("exact oracle assumes independent tails")
    N, d, k = model.N, model.d, q.k
    S = q.test_set
    side = scheme.base**scheme.depth
    dists = [list(coordinate_cell_distribution(scheme, [x[i] for x in net], cap).items())
             for i in range(d)]
    combos = math.prod(len(di) for di in dists)
    if combos > cap:
        raise BudgetExceeded(f"{combos} joint realizations exceed the cap {cap}")

    cache = {}

    def member(cells):
        v = cache.get(cells)
        if v is None:
            lo = tuple(Fraction(c, side) for c in cells)
            hi = tuple(Fraction(c + 1, side) for c in cells)
            v = cache[cells] = S.box_probability(lo, hi)
        return v

    J = sorted(q.J)
    joint = Fraction(0)
    marg = [Fraction(0)] * N
    norm = _falling(N, k)
    for combo in itertools.product(*dists):
        prob = math.prod((pc for _, pc in combo), start=Fraction(1))
        probs = [member(tuple(key[n] for key, _ in combo)) for n in range(N)]
        for n in range(N):
            marg[n] += prob * probs[n]
        ev = [q.event_probability(x) for x in probs]
        if scheme.symmetrize:
            joint += prob * math.factorial(k) * _elementary_symmetric(ev, k) / norm
        else:
            joint += prob * math.prod((ev[j - 1] for j in J), start=Fraction(1))
    if scheme.symmetrize:
        mean = sum(marg, Fraction(0)) / N
        product = q.event_probability(mean) ** k
    else:
        product = math.prod((q.event_probability(marg[j - 1]) for j in J), start=Fraction(1))
    return DependenceReport(joint, product, dependence_ratio(joint, product))


def exact_joint(q: DependenceQuery, model: RandomPointModel, **kw) -> DependenceReport:
    if model.kind == "lhs":
        return exact_joint_lhs(q, model.d, model.N, **kw)
    if model.kind == "mc":
        return exact_joint_mc(q, model.d, model.N)
    return exact_joint_scrambled_net(q, model, **kw)


# --- Rao-Blackwellized Monte Carlo ------------------------------------------------

def _lhs_conditional_values(q, d, N, reps, rng):
    J = np.array(sorted(q.J)) - 1
    outer = np.array([float(a) for a in q.test_set.outer.upper])
    inner = np.array([float(a) for a in q.test_set.effective_inner.upper])
    base = np.broadcast_to(np.arange(N), (reps, d, N))
    cells = rng.permuted(base, axis=2)[:, :, J]                     # (reps, d, k)
    fb = np.clip(N * outer[None, :, None] - cells, 0, 1).prod(axis=1)
    fa = np.clip(N * inner[None, :, None] - cells, 0, 1).prod(axis=1)
    p = fb - fa
    ev = p if q.side == UPPER else 1 - p
    return ev.prod(axis=1)


def _net_conditional_values(q, model, reps, seed):
    scheme, net = model.scheme, model.net
    b, depth = scheme.base, scheme.depth
    side = b**depth
    words = [[digits(x[i], b, depth) for i in range(model.d)] for x in net]
    outer = [float(a) for a in q.test_set.outer.upper]
    inner = [float(a) for a in q.test_set.effective_inner.upper]

    def overlap(upper, cells):
        r = 1.0
        for a, c in zip(upper, cells):
            r *= min(max(a * side - c, 0.0), 1.0)
        return r

    J = sorted(q.J)
    k = len(J)
    out = np.empty(reps)
    for r in range(reps):
        sch = scheme.with_seed(derive_seed(seed, "rb-net", r))
        tables = [draw_table(sch, i, {w[i] for w in words}) for i in range(model.d)]
        ev = []
        for w in words:
            cells = []
            for i, t in enumerate(tables):
                c = 0
                for dig in t(w[i]):
                    c = c * b + dig
                cells.append(c)
            p = overlap(outer, cells) - overlap(inner, cells)
            ev.append(p if q.side == UPPER else 1 - p)
        if scheme.symmetrize:
            e = np.zeros(k + 1)
            e[0] = 1.0
            for x in ev:
                e[1:] = e[1:] + e[:-1] * x
            out[r] = e[k] * math.factorial(k) / _falling(model.N, k)
        else:
            out[r] = math.prod(ev[j - 1] for j in J)
    return out


def mc_estimate_joint(q: DependenceQuery, model: RandomPointModel, reps: int,
                      seed: int) -> DependenceReport:
    """Rao-Blackwellized estimate of the joint probability.

    Each replication samples only the discrete layer of the model and adds
    the exact conditional probability of the joint event, so the estimator
    has no indicator noise.  The CI is a 99% normal approximation.
    """
    if reps < 100:
        raise ValueError("need at least 100 replications")
    _check_query(q, model.d, model.N)
    vol = q.test_set.volume()
    product = float(_product_of_marginals(q, vol))
    if model.kind == "mc":
        vals = np.full(reps, product)
    elif model.kind == "lhs":
        vals = _lhs_conditional_values(q, model.d, model.N, reps, stream(seed, "rb-lhs"))
    else:
        if model.scheme.shared_tail:
            raise ValueError("estimator assumes independent tails")
        vals = _net_conditional_values(q, model, reps, seed)
    mean = float(vals.mean())
    half = float(stats.norm.ppf(0.5 + CI_LEVEL / 2) * vals.std(ddof=1) / math.sqrt(reps))
    ci = (mean - half, mean + half)
    ratio = dependence_ratio(mean, product)
    ratio_ci = None
    if product > 0:
        ratio_ci = (ci[0] / product, ci[1] / product)
    return DependenceReport(mean, product, ratio, "estimated", ci, ratio_ci, reps)


# --- closed forms ------------------------------------------------------------------

@dataclass(frozen=True)
class LhsRatioTerms:
    """Terms of the LHS ratio for ``D = [0,(d-1)/d + eps)^d \\ [0,(d-1)/d)^d``."""

    d: int
    eps: float
    ratio: float
    event_probability: float      # d! / d^d
    joint: float                  # d! eps^d
    volume: float                 # vol(D)
    leading_volume: float         # eps d (1 - 1/d)^(d-1)
    remainder: float              # vol(D) - leading_volume
    T: float                      # (1 - remainder / volume)^d
    limit: float                  # ratio as eps -> 0


def _mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def lhs_ratio_analytic(d: int, eps) -> LhsRatioTerms:
    """Closed-form ratio for an LHS of ``d`` points in dimension ``d``.

    ``ratio = d!/d^d * ((1 - 1/d)^d)^(1-d) * T(eps, d)``, evaluated at 60
    significant digits.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    e = as_rational(eps) if not isinstance(eps, str) else Fraction(eps)
    if not 0 < e < Fraction(1, d):
        raise ValueError("need 0 < eps < 1/d")
    with mpmath.workdps(60):
        x = _mpf(e)
        qd = 1 - mpmath.mpf(1) / d
        vol = x * mpmath.fsum(mpmath.binomial(d, j) * qd**j * x**(d - 1 - j) for j in range(d))
        rem = x**2 * mpmath.fsum(mpmath.binomial(d, j) * qd**j * x**(d - 2 - j)
                                 for j in range(d - 1))
        lead = x * d * qd**(d - 1)
        T = (1 - rem / vol)**d
        event = mpmath.factorial(d) / mpmath.mpf(d)**d
        limit = event * (qd**d)**(1 - d)
        ratio = limit * T
        joint = mpmath.factorial(d) * x**d
        return LhsRatioTerms(d, float(x), float(ratio), float(event), float(joint),
                             float(vol), float(lead), float(rem), float(T), float(limit))


def lhs_test_set(d: int, eps) -> TestSet:
    """``[0,(d-1)/d + eps)^d \\ [0,(d-1)/d)^d``."""
    c = Fraction(d - 1, d)
    e = as_rational(eps)
    return TestSet.difference((c,) * d, (c + e,) * d)


def half_test_set(eps, d: int = 3) -> TestSet:
    """``[0,1/2 + eps)^d \\ [0,1/2)^d``."""
    h = Fraction(1, 2)
    return TestSet.difference((h,) * d, (h + as_rational(eps),) * d)


def net_ratio_analytic(eps):
    """``(3/4 + 3 eps/2 + eps^2)^-3``: the (0,2,3)-net ratio for the half box.

    Exact for rational ``eps``, float otherwise.
    """
    exact = isinstance(eps, (Fraction, int))
    e = as_rational(eps)
    if not 0 < e < Fraction(1, 4):
        raise ValueError("need 0 < eps < 1/4")
    r = (Fraction(3, 4) + Fraction(3, 2) * e + e * e) ** -3
    return r if exact else float(r)


def lhs_vs_net_comparison(eps):
    """LHS analogue (4 points, d = 3) of the net ratio: ``2/9`` of it."""
    r = net_ratio_analytic(eps)
    return Fraction(2, 9) * r if isinstance(r, Fraction) else 2 / 9 * r


def unsymmetrized_lower_bound(b: int, N: int) -> Fraction:
    """``b^(N/b) / b``."""
    if b < 2:
        raise ValueError("base must be >= 2")
    if N % b:
        raise ValueError("b must divide N")
    return Fraction(b ** (N // b), b)


def pigeonhole_witness(net: PointSet, b: int):
    """Elementary box of volume 1/b holding >= N/b points, moved to the origin.

    Returns ``(TestSet E0, J)`` where ``J`` lists (1-based) ``N/b`` of the
    points inside the original box.
    """
    N, d = net.N, net.d
    if N % b:
        raise ValueError("b must divide N")
    for axis in range(d):
        for k in range(b):
            levels = tuple(1 if i == axis else 0 for i in range(d))
            idx = tuple(k if i == axis else 0 for i in range(d))
            E = ElementaryInterval(levels, idx, b)
            inside = [n + 1 for n, x in enumerate(net) if E.contains(x)]
            if len(inside) >= N // b:
                upper = tuple(Fraction(1, b) if i == axis else Fraction(1) for i in range(d))
                return TestSet.anchored(upper), frozenset(inside[:N // b])
    raise AssertionError("pigeonhole principle violated")


# --- correlation number search ---------------------------------------------------

DEFAULT_EPS_MESH = tuple(Fraction(1, 10**k) for k in range(1, 5))


@dataclass
class SearchCertificate:
    """Largest ratio seen; a lower bound on the correlation number, not its value."""

    ratio: object
    test_set: TestSet
    J: frozenset
    side: str
    evaluated: int
    family: str
    mode: str = "exact"

    def line(self) -> str:
        r = self.ratio
        rs = f"{r.numerator}/{r.denominator}" if isinstance(r, Fraction) else repr(r)
        return (f"lower_bound={rs} (~{float(r):.6g}) family={self.family} "
                f"set=\"{self.test_set}\" J={','.join(map(str, sorted(self.J)))} "
                f"side={self.side} evaluated={self.evaluated}")


def corner_grid(N: int, eps_mesh=DEFAULT_EPS_MESH) -> list:
    vals = {Fraction(k, N) for k in range(N + 1)}
    vals |= {Fraction(k, N) + e for k in range(N) for e in eps_mesh if Fraction(k, N) + e < 1}
    return sorted(vals)


def search_test_sets(d: int, N: int, family: str = "D", eps_mesh=DEFAULT_EPS_MESH):
    grid = corner_grid(N, eps_mesh)
    if family == "C":
        for a in itertools.product(grid, repeat=d):
            yield TestSet.anchored(a)
        return
    if family != "D":
        raise ValueError("family must be 'C' or 'D'")
    pairs = [(lo, hi) for lo in grid for hi in grid if lo <= hi]
    for combo in itertools.product(pairs, repeat=d):
        yield TestSet.difference(tuple(c[0] for c in combo), tuple(c[1] for c in combo))


def search_index_sets(model: RandomPointModel):
    N = model.N
    if model.exchangeable:
        for k in range(2, N + 1):
            yield frozenset(range(1, k + 1))
        return
    for k in range(2, N + 1):
        for J in itertools.combinations(range(1, N + 1), k):
            yield frozenset(J)


def correlation_number_search(model: RandomPointModel, budget: int = 10**5,
                              family: str = "D", eps_mesh=DEFAULT_EPS_MESH,
                              mode: str = "exact", reps: int = 2000,
                              seed: int = 0) -> SearchCertificate:
    """Largest dependence ratio over a grid of test sets and index sets.

    Corners are taken from ``{k/N} ∪ {k/N + eps}``.  Singletons are skipped
    (their ratio is always 1).  In estimated mode the ratios are point
    estimates, so the result is only an empirical lower bound.
    """
    d, N = model.d, model.N
    n_sets = len(corner_grid(N, eps_mesh))
    if family == "D":
        n_sets = (n_sets * (n_sets + 1) // 2) ** d
    else:
        n_sets = n_sets**d
    Js = list(search_index_sets(model))
    total = n_sets * max(len(Js), 1) * 2
    if total > budget:
        raise BudgetExceeded(f"search needs {total} evaluations, budget is {budget}")
    best = None
    evaluated = 0
    for S in search_test_sets(d, N, family, eps_mesh):
        for J in Js or [frozenset({1})]:
            for side in (UPPER, LOWER):
                q = DependenceQuery(S, J, side)
                if mode == "exact":
                    rep = exact_joint(q, model)
                else:
                    rep = mc_estimate_joint(q, model, reps, derive_seed(seed, evaluated))
                evaluated += 1
                if best is None or rep.ratio > best[0]:
                    best = (rep.ratio, S, J, side)
    ratio, S, J, side = best
    return SearchCertificate(ratio, S, J, side, evaluated, family, mode)
