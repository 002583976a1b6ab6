from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from negdep.dependence import RandomPointModel
from negdep.discrepancy import (BoundParams, bound_vs_empirical, gamma_log_for, min_constant,
                                star_discrepancy_bruteforce, star_discrepancy_exact,
                                success_probability)
from negdep.errors import BudgetExceeded
from negdep.geometry import PointSet
from negdep.sampling import gen_lhs, gen_mc

F = Fraction
coord = st.integers(0, 15).map(lambda k: F(k, 16))


@st.composite
def grid_sets(draw, max_d=3, max_n=8):
    d = draw(st.integers(1, max_d))
    n = draw(st.integers(1, max_n))
    return PointSet(tuple(draw(st.lists(st.tuples(*[coord] * d), min_size=n, max_size=n))))


def test_single_origin_point():
    assert star_discrepancy_exact(PointSet(((F(0), F(0)),))) == 1


def test_midpoints_1d():
    p = PointSet(tuple((F(2 * k + 1, 16),) for k in range(8)))
    assert star_discrepancy_exact(p) == F(1, 16)


def test_left_endpoints_1d():
    p = PointSet(tuple((F(k, 4),) for k in range(4)))
    assert star_discrepancy_exact(p) == F(1, 4)


def test_float_input_gives_float():
    p = gen_mc(2, 20, 1)
    v = star_discrepancy_exact(p)
    assert isinstance(v, float)
    assert v == pytest.approx(star_discrepancy_bruteforce(p), abs=1e-12)


def test_budget():
    with pytest.raises(BudgetExceeded):
        star_discrepancy_exact(gen_mc(3, 50, 1), budget=1000)


@given(grid_sets())
def test_exact_matches_bruteforce(p):
    assert star_discrepancy_exact(p) == star_discrepancy_bruteforce(p)


@given(grid_sets(max_d=2, max_n=5))
def test_dominates_half_open_grid_scan(p):
    assert star_discrepancy_exact(p) >= oracles.star_discrepancy_grid(p.points, 32)


@given(grid_sets(), st.randoms())
def test_order_invariance(p, rnd):
    pts = list(p.points)
    rnd.shuffle(pts)
    assert star_discrepancy_exact(PointSet(tuple(pts))) == star_discrepancy_exact(p)


@given(grid_sets(max_d=2))
def test_adding_a_point_recomputes_exactly(p):
    # put a new point at the origin of the most undercovered box and recompute
    q = PointSet(p.points + ((F(0),) * p.d,))
    assert star_discrepancy_exact(q) == star_discrepancy_bruteforce(q)


@given(st.integers(1, 3), st.integers(1, 10), st.integers(0, 2**32))
def test_bounds_of_dstar(d, n, seed):
    v = star_discrepancy_exact(gen_lhs(d, n, seed, exact=True)[0])
    assert F(0) < v <= 1


@pytest.mark.parametrize("rate,want", [(0, 2.5287), (1, 2.6442)])
def test_min_constant(rate, want):
    assert min_constant(rate) == want


def test_min_constant_is_minimal():
    for rate in (0, 1):
        c = min_constant(rate)
        assert 1.6741 * c**2 - 10.7042 > rate
        assert 1.6741 * (c - 1e-4) ** 2 - 10.7042 <= rate


@given(st.floats(0.1, 10), st.floats(0.1, 10), st.integers(1, 50), st.floats(0, 60))
def test_success_probability_monotone(c1, c2, d, g):
    lo, hi = sorted((c1, c2))
    p_lo = success_probability(BoundParams(lo, d, g))
    p_hi = success_probability(BoundParams(hi, d, g))
    assert 0 <= p_lo <= p_hi <= 1
    assert success_probability(BoundParams(hi, d, g + 1)) <= p_hi


def test_success_probability_values():
    assert success_probability(BoundParams(2.5287, 1, 0)) > 0
    assert success_probability(BoundParams(1.0, 1, 0)) == 0.0
    assert success_probability(BoundParams(10.0, 5, 5)) == pytest.approx(1.0)


def test_gamma_logs():
    assert gamma_log_for("mc", 7) == 0
    assert gamma_log_for("lhs", 7) == 7
    with pytest.raises(ValueError):
        gamma_log_for("scrambled-net", 3)


def test_bound_check_consistent():
    chk = bound_vs_empirical(RandomPointModel.lhs(2, 32), 2.6442, range(20))
    assert chk.consistent and chk.fraction_within == 1
    assert len(chk.discrepancies) == 20
