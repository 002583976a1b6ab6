import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from negdep.geometry import (AnchoredBox, ElementaryInterval, PointSet, TestSet, basic_cube,
                             cell_index, compositions, contains, count_elementary_intervals,
                             count_in, dumps_points, enumerate_elementary_intervals, is_fair,
                             loads_points, volume)

F = Fraction
unit = st.fractions(min_value=0, max_value=1, max_denominator=64)
point_coord = st.fractions(min_value=0, max_value=1, max_denominator=64).filter(lambda x: x < 1)


def boxes(d):
    return st.tuples(*[unit] * d)


@st.composite
def point_sets(draw, max_d=3, max_n=12):
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(1, max_n))
    pts = draw(st.lists(st.tuples(*[point_coord] * d), min_size=n, max_size=n))
    return PointSet(tuple(pts))


# --- examples ---------------------------------------------------------------------

def test_volume_full_cube():
    assert volume(TestSet.anchored((1, 1, 1))) == 1


def test_volume_shell_around_half_cube():
    e = F(1, 100)
    S = TestSet.difference((F(1, 2),) * 3, (F(1, 2) + e,) * 3)
    assert S.volume() == e * (F(3, 4) + 3 * e / 2 + e * e)
    assert S.volume() == F(7651, 10**6)


def test_volume_shell_around_two_thirds_cube():
    e = F(1, 100)
    S = TestSet.difference((F(2, 3),) * 3, (F(2, 3) + e,) * 3)
    assert S.volume() == F(4, 3) * e + 2 * e**2 + e**3


def test_membership_examples():
    assert contains(TestSet.anchored((F(1, 3), F(1, 5))), (0, 0))
    assert not contains(AnchoredBox((F(1, 2), 1)), (F(1, 2), F(1, 10)))
    D = TestSet.difference((F(1, 2), F(1, 2)), (F(3, 4), F(3, 4)))
    assert contains(D, (0.6, 0.1))
    assert not contains(D, (0.1, 0.1))


def test_fairness_examples():
    p = PointSet(((F(0), F(0)), (F(1, 2), F(1, 2))))
    assert is_fair(p, AnchoredBox((1, 1)))
    twin = PointSet(((F(1, 4),), (F(1, 4),)))
    assert not is_fair(twin, ElementaryInterval((1,), (0,), 2))


@pytest.mark.parametrize("b,order,d,count", [(2, 2, 3, 24), (2, 0, 3, 1), (3, 1, 2, 6)])
def test_elementary_interval_counts(b, order, d, count):
    ivs = list(enumerate_elementary_intervals(b, order, d))
    assert len(ivs) == count == count_elementary_intervals(b, order, d)
    assert len(set(ivs)) == count


def test_enumeration_limit():
    with pytest.raises(OverflowError):
        list(enumerate_elementary_intervals(2, 10, 5, limit=100))


def test_basic_cube_volume():
    c = basic_cube((1, 0, 3), 2, 2)
    assert c.volume() == F(1, 64)
    assert c.contains((F(1, 4), F(0), F(3, 4)))
    assert not c.contains((F(1, 2), F(0), F(3, 4)))


def test_empty_box_is_legal():
    S = TestSet.anchored((0, F(1, 2)))
    assert S.volume() == 0
    assert not S.contains((0, 0))


def test_pointset_validation():
    with pytest.raises(ValueError):
        PointSet(((F(1),),))
    with pytest.raises(ValueError):
        PointSet(((0.1, 0.2), (0.3,)))
    with pytest.raises(ValueError):
        PointSet(())


def test_cell_index_is_exact_on_boundaries():
    assert cell_index(F(1, 3), 3) == 1
    assert cell_index(F(1, 3) - F(1, 10**30), 3) == 0


def test_point_file_roundtrip_exact():
    p = PointSet(((F(1, 3), F(0)), (F(2, 7), F(5, 9))))
    text = dumps_points(p)
    assert text.splitlines()[0] == "2 2"
    assert loads_points(text).points == p.points


def test_point_file_roundtrip_float():
    p = PointSet(((0.1, 0.7000000000000001),))
    assert loads_points(dumps_points(p)).points == p.points


def test_point_file_rejects_bad_header():
    with pytest.raises(ValueError):
        loads_points("2 3\n0 0\n")


# --- properties -------------------------------------------------------------------

@given(st.integers(1, 4).flatmap(lambda d: st.tuples(boxes(d), boxes(d))))
def test_volume_identity_for_nested_boxes(ab):
    a, b = ab
    inner = tuple(min(x, y) for x, y in zip(a, b))
    S = TestSet.difference(inner, b)
    v = S.volume()
    assert 0 <= v <= 1
    assert v == AnchoredBox(b).volume() - AnchoredBox(inner).volume()


@given(st.integers(1, 3).flatmap(lambda d: st.tuples(boxes(d), boxes(d))))
def test_general_position_volume_matches_grid_count(ab):
    # B \ A measured by exact integration over the grid cut at every corner
    a, b = ab
    S = TestSet.difference(a, b)
    cuts = [sorted({F(0), F(1), ai, bi}) for ai, bi in zip(a, b)]
    total = F(0)
    for cell in itertools.product(*[list(zip(c, c[1:])) for c in cuts]):
        mid = tuple((lo + hi) / 2 for lo, hi in cell)
        if S.contains(mid):
            vol = F(1)
            for lo, hi in cell:
                vol *= hi - lo
            total += vol
    assert S.volume() == total


@given(st.integers(1, 4).flatmap(boxes))
def test_half_open_semantics(upper):
    box = AnchoredBox(upper)
    d = len(upper)
    if not box.is_empty:
        assert box.contains((F(0),) * d)
    for i, u in enumerate(upper):
        if u < 1:
            x = [F(0)] * d
            x[i] = u
            assert not box.contains(tuple(x))


@given(st.integers(2, 3), st.integers(0, 3), point_sets())
def test_interval_counts_partition_points(b, order, p):
    for levels in compositions(order, p.d):
        ivs = [ElementaryInterval(levels, idx, b)
               for idx in itertools.product(*(range(b**l) for l in levels))]
        assert sum(count_in(p, e) for e in ivs) == p.N


@given(st.integers(2, 3), st.integers(0, 3), st.integers(1, 3))
def test_elementary_volumes(b, order, d):
    for e in enumerate_elementary_intervals(b, order, d):
        assert e.volume() == F(1, b**order)
        assert e.contains(e.lower)
        assert not e.contains(e.upper)


@given(point_sets())
def test_anchored_is_difference_with_empty_inner(p):
    S = TestSet.anchored((F(1, 2),) * p.d)
    T = TestSet.difference((F(0),) * p.d, (F(1, 2),) * p.d)
    assert [S.contains(x) for x in p] == [T.contains(x) for x in p]
