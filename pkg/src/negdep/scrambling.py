"""b-ary random scramblings of depth l, symmetrization, and checks of the
abstract scrambled net conditions.

A scrambling maps the first ``depth`` base-b digits of every coordinate
through random digit permutations and replaces the remaining digits by an
independent uniform tail ``y * b**-depth`` drawn per point *index* (two equal
input points still receive independent tails).

Frameworks
    ``nested``      permutation for digit j depends on the j-1 preceding digits
    ``positional``  permutation for digit j depends on j only

Families
    ``uniform``        all b! permutations
    ``linear``         x -> h*x + g mod b, h != 0 (prime b)
    ``digital-shift``  x -> x + g mod b
    ``affine-matrix``  digit k -> h_kk x_k + sum_{j<k} h_kj x_j + g_k mod b
                       (framework ignored; nested maps, positional randomness)
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np
from scipy import stats

from .errors import BudgetExceeded
from .geometry import PointSet, as_rational, cell_index
from .rng import check_seed, derive_seed, stream
from .sampling import EXACT_DENOMINATOR, NetParams, is_prime, verify_net

FRAMEWORKS = ("nested", "positional")
FAMILIES = ("uniform", "linear", "digital-shift", "affine-matrix")

SCHEME_NAMES = {
    "nested-uniform": ("nested", "uniform"),
    "positional-uniform": ("positional", "uniform"),
    "nested-linear": ("nested", "linear"),
    "positional-linear": ("positional", "linear"),
    "nested-shift": ("nested", "digital-shift"),
    "positional-shift": ("positional", "digital-shift"),
    "affine-matrix": ("nested", "affine-matrix"),
}

DEFAULT_REALIZATION_CAP = 10**6


@dataclass(frozen=True)
class ScramblingScheme:
    framework: str = "nested"
    family: str = "uniform"
    depth: int = 1
    base: int = 2
    symmetrize: bool = False
    seed: int = 0
    # diagnostic only: one tail vector shared by all points (violates (iii))
    shared_tail: bool = False

    def __post_init__(self):
        if self.framework not in FRAMEWORKS:
            raise ValueError(f"unknown framework {self.framework!r}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown permutation family {self.family!r}")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.family in ("linear", "affine-matrix") and not is_prime(self.base):
            raise ValueError(f"{self.family} scrambling needs a prime base")
        check_seed(self.seed)

    @classmethod
    def from_name(cls, name: str, **kw) -> "ScramblingScheme":
        try:
            framework, family = SCHEME_NAMES[name]
        except KeyError:
            raise ValueError(f"unknown scheme {name!r}; choose from {sorted(SCHEME_NAMES)}")
        return cls(framework=framework, family=family, **kw)

    @classmethod
    def for_net(cls, name: str, params: NetParams, **kw) -> "ScramblingScheme":
        """Scheme of depth ``m - t`` in the net's base."""
        kw.setdefault("depth", params.order)
        return cls.from_name(name, base=params.b, **kw)

    @property
    def name(self) -> str:
        if self.family == "affine-matrix":
            return "affine-matrix"
        short = {"uniform": "uniform", "linear": "linear", "digital-shift": "shift"}
        return f"{self.framework}-{short[self.family]}"

    def with_seed(self, seed: int) -> "ScramblingScheme":
        return replace(self, seed=seed)


# --- digits and permutations --------------------------------------------------

def digits(x, b: int, length: int) -> tuple:
    """First ``length`` base-b digits of ``x`` in [0,1) (terminating expansion)."""
    k = cell_index(as_rational(x), b**length)
    out = []
    for _ in range(length):
        k, r = divmod(k, b)
        out.append(r)
    return tuple(reversed(out))


def from_digits(ds, b: int) -> Fraction:
    k = 0
    for x in ds:
        k = k * b + x
    return Fraction(k, b**len(ds))


def permutation_family(family: str, b: int) -> list:
    """All members of a permutation family (each equally likely)."""
    if family == "uniform":
        return [tuple(p) for p in itertools.permutations(range(b))]
    if family == "linear":
        if not is_prime(b):
            raise ValueError("linear permutations need a prime base")
        return [tuple((h * x + g) % b for x in range(b))
                for h in range(1, b) for g in range(b)]
    if family == "digital-shift":
        return [tuple((x + g) % b for x in range(b)) for g in range(b)]
    raise ValueError(f"no single-digit permutation family {family!r}")


def sample_permutation(family: str, b: int, rng) -> tuple:
    """Uniform draw from the named family of permutations of {0..b-1}."""
    if b < 2:
        raise ValueError("base must be >= 2")
    if family == "uniform":
        return tuple(int(v) for v in rng.permutation(b))
    if family == "linear":
        if not is_prime(b):
            raise ValueError("linear permutations need a prime base")
        h = int(rng.integers(1, b))
        g = int(rng.integers(0, b))
        return tuple((h * x + g) % b for x in range(b))
    if family == "digital-shift":
        g = int(rng.integers(0, b))
        return tuple((x + g) % b for x in range(b))
    raise ValueError(f"no single-digit permutation family {family!r}")


# --- per-coordinate digit maps ---------------------------------------------------

@dataclass(frozen=True)
class NestedTable:
    perms: dict  # digit prefix (tuple) -> permutation

    def __call__(self, ds):
        return tuple(self.perms[ds[:j]][ds[j]] for j in range(len(ds)))


@dataclass(frozen=True)
class PositionalTable:
    perms: tuple

    def __call__(self, ds):
        return tuple(p[x] for p, x in zip(self.perms, ds))


@dataclass(frozen=True)
class AffineTable:
    h: tuple  # lower triangular, h[k][k] in 1..b-1
    g: tuple
    b: int

    def __call__(self, ds):
        b = self.b
        return tuple((sum(self.h[k][j] * ds[j] for j in range(k + 1)) + self.g[k]) % b
                     for k in range(len(ds)))


def proper_prefixes(words) -> list:
    """All prefixes of length 0..l-1 of the given digit words, sorted."""
    return sorted({w[:j] for w in words for j in range(len(w))}, key=lambda p: (len(p), p))


def draw_table(scheme: ScramblingScheme, coord: int, words):
    """Random digit map for one coordinate, keyed by (seed, coordinate, node)."""
    b, depth, seed = scheme.base, scheme.depth, scheme.seed
    if scheme.family == "affine-matrix":
        rng = stream(seed, "affine", coord, depth)
        h = []
        for k in range(depth):
            row = [int(v) for v in rng.integers(0, b, size=k)]
            row.append(int(rng.integers(1, b)))
            h.append(tuple(row))
        g = tuple(int(v) for v in rng.integers(0, b, size=depth))
        return AffineTable(tuple(h), g, b)
    if scheme.framework == "positional":
        return PositionalTable(tuple(
            sample_permutation(scheme.family, b, stream(seed, "positional", coord, j))
            for j in range(depth)))
    perms = {pre: sample_permutation(scheme.family, b,
                                     stream(seed, "nested", coord, len(pre), *pre))
             for pre in proper_prefixes(words)}
    return NestedTable(perms)


def enumerate_tables(scheme: ScramblingScheme, words, cap: int = DEFAULT_REALIZATION_CAP):
    """Every equally likely digit map of one coordinate restricted to ``words``.

    Yields ``(probability, table)``; only the nodes reached by ``words`` are
    enumerated, which is exact because other nodes never influence the output.
    """
    b, depth = scheme.base, scheme.depth
    if scheme.family == "affine-matrix":
        n = (b - 1)**depth * b**(depth * (depth - 1) // 2) * b**depth
        _check_cap(n, cap)
        p = Fraction(1, n)
        diag_choices = itertools.product(range(1, b), repeat=depth)
        for diag in diag_choices:
            for low in itertools.product(range(b), repeat=depth * (depth - 1) // 2):
                it = iter(low)
                h = tuple(tuple(next(it) for _ in range(k)) + (diag[k],) for k in range(depth))
                for g in itertools.product(range(b), repeat=depth):
                    yield p, AffineTable(h, g, b)
        return
    fam = permutation_family(scheme.family, b)
    if scheme.framework == "positional":
        n = len(fam)**depth
        _check_cap(n, cap)
        p = Fraction(1, n)
        for perms in itertools.product(fam, repeat=depth):
            yield p, PositionalTable(perms)
        return
    nodes = proper_prefixes(words)
    n = len(fam)**len(nodes)
    _check_cap(n, cap)
    p = Fraction(1, n)
    for perms in itertools.product(fam, repeat=len(nodes)):
        yield p, NestedTable(dict(zip(nodes, perms)))


def _check_cap(n, cap):
    if n > cap:
        raise RealizationCapExceeded(f"{n} scrambling realizations exceed the cap {cap}")


class RealizationCapExceeded(BudgetExceeded):
    pass


# --- scrambling of point sets ------------------------------------------------------

@dataclass(frozen=True)
class ScramblingRealization:
    scheme: ScramblingScheme
    tables: tuple      # one digit map per coordinate
    tails: tuple       # tails[n][i] in [0,1), attached to input index n
    relabel: tuple     # output j is input relabel[j]

    def cells(self, p: PointSet) -> tuple:
        """Scrambled depth-l digit prefixes (as integers) of every input point."""
        b, depth = self.scheme.base, self.scheme.depth
        out = []
        for x in p:
            row = []
            for i, t in enumerate(self.tables):
                k = 0
                for dig in t(digits(x[i], b, depth)):
                    k = k * b + dig
                row.append(k)
            out.append(tuple(row))
        return tuple(out)


def _check_capacity(p: PointSet, b: int, depth: int):
    if not p.is_exact and b**depth > 2**53:
        raise ValueError("scrambling depth exceeds the resolution of float coordinates")


def draw_realization(scheme: ScramblingScheme, p: PointSet) -> ScramblingRealization:
    b, depth, seed = scheme.base, scheme.depth, scheme.seed
    _check_capacity(p, b, depth)
    N, d = p.N, p.d
    tables = tuple(draw_table(scheme, i, {digits(x[i], b, depth) for x in p})
                   for i in range(d))
    raw = stream(seed, "tail").integers(0, EXACT_DENOMINATOR, size=(N, d), dtype=np.uint64)
    if scheme.shared_tail:
        raw = np.broadcast_to(raw[0], (N, d))
    tails = tuple(tuple(Fraction(int(v), EXACT_DENOMINATOR) for v in row) for row in raw)
    if scheme.symmetrize:
        relabel = tuple(int(v) for v in stream(seed, "relabel").permutation(N))
    else:
        relabel = tuple(range(N))
    return ScramblingRealization(scheme, tables, tails, relabel)


def scramble(p: PointSet, scheme: ScramblingScheme):
    """Apply a d-tuple of independent depth-l scramblings to ``p``.

    Returns ``(scrambled point set, realization)``.  Output coordinates are
    exact rationals.
    """
    real = draw_realization(scheme, p)
    b, depth = scheme.base, scheme.depth
    scale = b**depth
    cells = real.cells(p)
    moved = [tuple((Fraction(k) + y) / scale for k, y in zip(cells[n], real.tails[n]))
             for n in range(p.N)]
    out = tuple(moved[real.relabel[j]] for j in range(p.N))
    return PointSet(out, f"{scheme.name}(depth={depth},seed={scheme.seed})<-{p.label}"), real


def infinite_digit_scramble(p: PointSet, b: int, precision: int, seed: int) -> PointSet:
    """Nested uniform scrambling of every digit up to ``precision``, no tail.

    Simulates the infinite-digit scrambling truncated after ``precision``
    digits.
    """
    if precision < 1:
        raise ValueError("precision must be >= 1")
    scheme = ScramblingScheme("nested", "uniform", precision, b, seed=seed)
    _check_capacity(p, b, precision)
    words = [[digits(x[i], b, precision) for i in range(p.d)] for x in p]
    tables = [draw_table(scheme, i, {w[i] for w in words}) for i in range(p.d)]
    out = tuple(tuple(from_digits(tables[i](w[i]), b) for i in range(p.d)) for w in words)
    return PointSet(out, f"infinite-digit(precision={precision},seed={seed})<-{p.label}")


# --- abstract scrambled net conditions ----------------------------------------------

class InsufficientTrials(Exception):
    pass


@dataclass
class AbstractNetReport:
    trials: int
    alpha: float
    net_property: bool                 # condition (i)
    net_failures: int
    cube_pvalue: float                 # condition (ii), smallest per-point chi-square p
    cube_uniform: bool
    within_ks_pvalue: float            # condition (iii), smallest per point/axis KS p
    within_corr_pvalue: float          # condition (iii), smallest pairwise corr p
    within_independent: bool
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.net_property and self.cube_uniform and self.within_independent

    def __bool__(self):
        return self.ok


def verify_abstract_conditions(scheme, params: NetParams, p: PointSet, trials: int,
                               alpha: float = 1e-3, seed: int = 0) -> AbstractNetReport:
    """Statistical check of conditions (i)-(iii) for a scrambled net.

    ``scheme`` is a :class:`ScramblingScheme` (re-seeded per trial) or any
    callable ``(p, seed) -> PointSet``.  Every family of tests is
    Bonferroni-corrected so that each of (ii) and (iii) is run at level
    ``alpha`` overall.
    """
    if not verify_net(p, params):
        raise ValueError("input point set is not a net with the given parameters")
    b, order, d, N = params.b, params.order, params.d, params.N
    q = b**order
    n_cubes = q**d
    if trials < 5 * n_cubes or trials < 20:
        raise InsufficientTrials(
            f"{trials} trials give fewer than 5 expected hits per basic cube ({n_cubes} cubes)")

    if isinstance(scheme, ScramblingScheme):
        def run(k):
            return scramble(p, scheme.with_seed(derive_seed(seed, "trial", k)))[0]
    else:
        def run(k):
            return scheme(p, derive_seed(seed, "trial", k))

    cube_counts = np.zeros((N, n_cubes), dtype=np.int64)
    within = np.empty((trials, N, d))
    net_failures = 0
    for k in range(trials):
        y = run(k)
        if not verify_net(y, params):
            net_failures += 1
        for n, x in enumerate(y):
            idx = 0
            for i in range(d):
                c = cell_index(x[i], q)
                idx = idx * q + c
                within[k, n, i] = float(as_rational(x[i]) * q - c)
            cube_counts[n, idx] += 1

    cube_p = min(stats.chisquare(cube_counts[n]).pvalue for n in range(N))
    cube_ok = cube_p >= alpha / N

    ks_p = min(stats.kstest(within[:, n, i], "uniform").pvalue
               for n in range(N) for i in range(d))
    # pairwise independence of within-cube positions, same and different axes
    flat = within.reshape(trials, N * d)
    pairs = [(u, v) for u in range(N * d) for v in range(u + 1, N * d) if u // d != v // d]
    corr_p = 1.0
    if pairs:
        corr_p = min(_corr_pvalue(flat[:, u], flat[:, v]) for u, v in pairs)
    n_iii = N * d + len(pairs)
    within_ok = ks_p >= alpha / n_iii and corr_p >= alpha / n_iii

    return AbstractNetReport(
        trials=trials, alpha=alpha,
        net_property=net_failures == 0, net_failures=net_failures,
        cube_pvalue=float(cube_p), cube_uniform=bool(cube_ok),
        within_ks_pvalue=float(ks_p), within_corr_pvalue=float(corr_p),
        within_independent=bool(within_ok),
        details={"cube_counts": cube_counts, "n_pair_tests": len(pairs)},
    )


def _corr_pvalue(u, v) -> float:
    su, sv = u.std(), v.std()
    if su == 0 or sv == 0:
        # a degenerate coordinate is itself evidence against uniformity
        return 0.0
    r = float(np.corrcoef(u, v)[0, 1])
    if abs(r) >= 1:
        return 0.0
    n = len(u)
    t = r * math.sqrt((n - 2) / (1 - r * r))
    return float(2 * stats.t.sf(abs(t), n - 2))
