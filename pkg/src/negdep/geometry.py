"""Points, anchored boxes, difference sets and b-adic intervals.

All boxes are half-open: lower faces closed, upper faces open.  Coordinates
are either ``fractions.Fraction`` (exact, produced by enumeration and by the
digital constructions) or ``float`` (produced by plain sampling).  Membership
and fairness decisions on rational data never touch floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real
from typing import Iterable, Sequence, Union

Coord = Union[Fraction, float]
Point = tuple  # tuple of Coord, length d

DEFAULT_INTERVAL_LIMIT = 10**6


def as_rational(x) -> Fraction:
    """Convert ``x`` to an exact Fraction (floats are converted bit-exactly)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Real):
        if not math.isfinite(x):
            raise ValueError(f"non-finite coordinate {x!r}")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a rational number")


@dataclass(frozen=True)
class PointSet:
    """Ordered tuple of N points in [0,1)^d.

    Order matters: index n (0-based here, 1-based in index sets ``J``)
    identifies the random variable attached to the n-th point.
    """

    points: tuple
    label: str = ""

    def __post_init__(self):
        pts = tuple(tuple(p) for p in self.points)
        if not pts:
            raise ValueError("a point set needs at least one point")
        d = len(pts[0])
        if d < 1:
            raise ValueError("dimension must be >= 1")
        for p in pts:
            if len(p) != d:
                raise ValueError("all points must share the same dimension")
            for x in p:
                if not 0 <= x < 1:
                    raise ValueError(f"coordinate {x!r} outside [0,1)")
        object.__setattr__(self, "points", pts)

    @property
    def d(self) -> int:
        return len(self.points[0])

    @property
    def N(self) -> int:
        return len(self.points)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def is_exact(self) -> bool:
        return all(isinstance(x, Fraction) for p in self.points for x in p)


@dataclass(frozen=True)
class AnchoredBox:
    """The box ``[0, a)``; empty as soon as one ``a_i`` is zero."""

    upper: tuple

    def __post_init__(self):
        up = tuple(as_rational(a) for a in self.upper)
        if not up:
            raise ValueError("dimension must be >= 1")
        for a in up:
            if not 0 <= a <= 1:
                raise ValueError(f"box corner {a} outside [0,1]")
        object.__setattr__(self, "upper", up)

    @property
    def d(self) -> int:
        return len(self.upper)

    @property
    def is_empty(self) -> bool:
        return any(a == 0 for a in self.upper)

    def volume(self) -> Fraction:
        return math.prod(self.upper, start=Fraction(1))

    def contains(self, x) -> bool:
        _check_dim(self.d, x)
        return all(xi < a for xi, a in zip(x, self.upper))

    def intersect(self, other: "AnchoredBox") -> "AnchoredBox":
        _check_dim(self.d, other.upper)
        return AnchoredBox(tuple(min(a, b) for a, b in zip(self.upper, other.upper)))

    @classmethod
    def full(cls, d: int) -> "AnchoredBox":
        return cls((Fraction(1),) * d)

    @classmethod
    def empty(cls, d: int) -> "AnchoredBox":
        return cls((Fraction(0),) * d)


@dataclass(frozen=True)
class TestSet:
    """The difference ``B \\ A`` of two anchored boxes.

    ``inner`` defaults to the empty box, so plain anchored boxes are test sets
    too.  ``inner`` need not be contained in ``outer``.
    """

    __test__ = False  # keep pytest from collecting this class

    outer: AnchoredBox
    inner: AnchoredBox = None

    def __post_init__(self):
        if not isinstance(self.outer, AnchoredBox):
            object.__setattr__(self, "outer", AnchoredBox(self.outer))
        inner = self.inner
        if inner is None:
            inner = AnchoredBox.empty(self.outer.d)
        elif not isinstance(inner, AnchoredBox):
            inner = AnchoredBox(inner)
        if inner.d != self.outer.d:
            raise ValueError("inner and outer boxes differ in dimension")
        object.__setattr__(self, "inner", inner)

    @classmethod
    def difference(cls, inner, outer) -> "TestSet":
        return cls(AnchoredBox(tuple(outer)), AnchoredBox(tuple(inner)))

    @classmethod
    def anchored(cls, upper) -> "TestSet":
        return cls(AnchoredBox(tuple(upper)))

    @property
    def d(self) -> int:
        return self.outer.d

    @property
    def is_anchored(self) -> bool:
        """True if the set is a plain anchored box (member of the C family)."""
        return self.inner.is_empty

    @property
    def effective_inner(self) -> AnchoredBox:
        """``A ∩ B``, the part of ``A`` that is actually removed from ``B``."""
        return self.inner.intersect(self.outer)

    def volume(self) -> Fraction:
        # vol(B \ A) = vol(B) - vol(A ∩ B), valid for arbitrary A
        return self.outer.volume() - self.effective_inner.volume()

    def contains(self, x) -> bool:
        return self.outer.contains(x) and not self.inner.contains(x)

    def box_probability(self, lo, hi) -> Fraction:
        """Fraction of the box ``prod [lo_i, hi_i)`` that lies in the set."""
        return (_overlap(self.outer.upper, lo, hi)
                - _overlap(self.effective_inner.upper, lo, hi))

    def __str__(self):
        outer = ",".join(str(a) for a in self.outer.upper)
        if self.inner.is_empty and all(a == 0 for a in self.inner.upper):
            return outer
        inner = ",".join(str(a) for a in self.inner.upper)
        return f"{inner}:{outer}"


def _overlap(upper, lo, hi) -> Fraction:
    """Relative volume of ``[0,upper) ∩ prod[lo,hi)`` inside ``prod[lo,hi)``."""
    r = Fraction(1)
    for a, l, h in zip(upper, lo, hi):
        if a <= l:
            return Fraction(0)
        if a < h:
            r *= (a - l) / (h - l)
    return r


@dataclass(frozen=True)
class ElementaryInterval:
    """``prod_i [k_i b^-l_i, (k_i+1) b^-l_i)`` in base ``b``."""

    levels: tuple
    indices: tuple
    base: int = 2

    def __post_init__(self):
        levels = tuple(int(l) for l in self.levels)
        indices = tuple(int(k) for k in self.indices)
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if len(levels) != len(indices) or not levels:
            raise ValueError("levels and indices must be non-empty and of equal length")
        for l, k in zip(levels, indices):
            if l < 0 or not 0 <= k < self.base**l:
                raise ValueError(f"invalid level/index pair ({l}, {k})")
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "indices", indices)

    @property
    def d(self) -> int:
        return len(self.levels)

    @property
    def order(self) -> int:
        return sum(self.levels)

    @property
    def lower(self) -> tuple:
        return tuple(Fraction(k, self.base**l) for l, k in zip(self.levels, self.indices))

    @property
    def upper(self) -> tuple:
        return tuple(Fraction(k + 1, self.base**l) for l, k in zip(self.levels, self.indices))

    def volume(self) -> Fraction:
        return Fraction(1, self.base**self.order)

    def contains(self, x) -> bool:
        _check_dim(self.d, x)
        return all(cell_index(xi, self.base**l) == k
                   for xi, l, k in zip(x, self.levels, self.indices))


def basic_cube(indices: Sequence[int], b: int, order: int) -> ElementaryInterval:
    """Basic cube of side ``b^-order`` (``order = m - t`` for a net)."""
    return ElementaryInterval((order,) * len(indices), tuple(indices), b)


def cell_index(x, q: int) -> int:
    """``floor(q * x)`` computed exactly for rational ``x``."""
    if isinstance(x, Fraction):
        return (x.numerator * q) // x.denominator
    if isinstance(x, int):
        return x * q
    return int(math.floor(Fraction(x) * q))


def _check_dim(d, x):
    if len(x) != d:
        raise ValueError(f"dimension mismatch: expected {d}, got {len(x)}")


def volume(s) -> Fraction:
    """Exact Lebesgue measure of a test set, anchored box or elementary interval."""
    return s.volume()


def contains(s, x) -> bool:
    """Half-open membership test."""
    return s.contains(x)


def count_in(p: PointSet, s) -> int:
    return sum(1 for x in p if s.contains(x))


def is_fair(p: PointSet, f) -> bool:
    """True iff exactly ``N * vol(f)`` points of ``p`` lie in ``f``."""
    expected = p.N * f.volume()
    if expected.denominator != 1:
        return False
    return count_in(p, f) == expected


def compositions(total: int, parts: int) -> Iterable[tuple]:
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def count_elementary_intervals(b: int, order: int, d: int) -> int:
    return math.comb(order + d - 1, d - 1) * b**order


def enumerate_elementary_intervals(b: int, order: int, d: int,
                                   limit: int = DEFAULT_INTERVAL_LIMIT):
    """List every elementary interval of the given order, each exactly once."""
    if b < 2 or order < 0 or d < 1:
        raise ValueError("need b >= 2, order >= 0, d >= 1")
    n = count_elementary_intervals(b, order, d)
    if n > limit:
        raise OverflowError(f"{n} elementary intervals exceed the limit {limit}")
    out = []
    for levels in compositions(order, d):
        ranges = [range(b**l) for l in levels]
        for idx in itertools.product(*ranges):
            out.append(ElementaryInterval(levels, idx, b))
    return out


# --- point-set text format -------------------------------------------------

def format_coord(x) -> str:
    if isinstance(x, Fraction):
        return str(x)
    return repr(float(x))


def parse_coord(tok: str):
    if "/" in tok:
        return Fraction(tok)
    if any(c in tok for c in ".eEnN"):
        return float(tok)
    return Fraction(int(tok))


def dumps_points(p: PointSet) -> str:
    lines = [f"{p.d} {p.N}"]
    lines += [" ".join(format_coord(x) for x in pt) for pt in p]
    return "\n".join(lines) + "\n"


def loads_points(text: str, label: str = "") -> PointSet:
    rows = [ln.split() for ln in text.splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise ValueError("first line must be 'd N'")
    d, n = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != n:
        raise ValueError(f"header announces {n} points, found {len(body)}")
    pts = []
    for r in body:
        if len(r) != d:
            raise ValueError(f"expected {d} coordinates per line, got {len(r)}")
        pts.append(tuple(parse_coord(t) for t in r))
    return PointSet(tuple(pts), label)


def write_points(path, p: PointSet) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_points(p))


def read_points(path) -> PointSet:
    with open(path, encoding="utf-8") as fh:
        return loads_points(fh.read(), label=str(path))
