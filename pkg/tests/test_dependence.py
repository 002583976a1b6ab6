import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from negdep.dependence import (LOWER, UPPER, DependenceQuery, RandomPointModel,
                               correlation_number_search, dependence_ratio, exact_joint,
                               exact_joint_lhs, exact_joint_scrambled_net, gamma_AB,
                               half_test_set, lhs_ratio_analytic, lhs_test_set,
                               lhs_vs_net_comparison, mc_estimate_joint, net_ratio_analytic,
                               pigeonhole_witness, unsymmetrized_lower_bound)
from negdep.errors import BudgetExceeded
from negdep.geometry import TestSet
from negdep.repro import canonical_net, net_model

F = Fraction


def grid_coord(N):
    # on-grid, just-past-grid and generic rational corners
    return st.one_of(st.integers(0, N).map(lambda k: F(k, N)),
                     st.integers(0, N - 1).map(lambda k: F(k, N) + F(1, 50)),
                     st.fractions(0, 1, max_denominator=30))


@st.composite
def lhs_queries(draw, shapes=((2, 1), (2, 2), (3, 1), (3, 2), (2, 3))):
    N, d = draw(st.sampled_from(shapes))
    inner = tuple(draw(grid_coord(N)) for _ in range(d))
    outer = tuple(draw(grid_coord(N)) for _ in range(d))
    J = draw(st.sets(st.integers(1, N), min_size=1))
    side = draw(st.sampled_from([UPPER, LOWER]))
    return N, d, DependenceQuery(TestSet.difference(inner, outer), J, side)


# --- frozen values ------------------------------------------------------------------

def test_d2_ratio_frozen():
    rep = exact_joint_lhs(DependenceQuery(half_test_set(F(1, 10), 2), {1, 2}), 2, 2)
    assert rep.joint == F(1, 50)
    assert rep.product == F(121, 10000)
    assert rep.ratio == F(200, 121)


@pytest.mark.parametrize("e", [F(1, 10), F(1, 100), F(1, 1000)])
def test_d2_ratio_closed_form(e):
    rep = exact_joint_lhs(DependenceQuery(half_test_set(e, 2), {1, 2}), 2, 2)
    assert rep.joint == 2 * e**2
    assert rep.ratio == 2 / (1 + e) ** 2


def test_d3_joint_frozen():
    e = F(1, 100)
    rep = exact_joint_lhs(DependenceQuery(lhs_test_set(3, e), {1, 2, 3}), 3, 3)
    assert rep.joint == 6 * e**3
    assert math.isclose(float(rep.ratio), lhs_ratio_analytic(3, e).ratio, rel_tol=1e-12)


def test_closed_form_limits():
    assert math.isclose(lhs_ratio_analytic(2, F(1, 10)).ratio, 200 / 121, rel_tol=1e-14)
    assert lhs_ratio_analytic(3, F(1, 10**6)).limit == pytest.approx(81 / 32, rel=1e-14)
    assert lhs_ratio_analytic(2, F(1, 10**6)).limit == pytest.approx(2, rel=1e-14)


def test_net_closed_forms_frozen():
    e = F(1, 100)
    assert net_ratio_analytic(e) == (F(7651, 10000)) ** -3
    assert float(net_ratio_analytic(e)) == pytest.approx(2.232777, abs=1e-6)
    assert float(lhs_vs_net_comparison(e)) == pytest.approx(0.496173, abs=1e-6)
    assert net_ratio_analytic(0.001) == pytest.approx(2.356195, abs=1e-6)


@pytest.mark.parametrize("b,N,want", [(2, 4, 2), (2, 16, 128), (3, 9, 9)])
def test_unsymmetrized_bound(b, N, want):
    assert unsymmetrized_lower_bound(b, N) == want


@pytest.mark.parametrize("a,b,N,want", [
    ((F(1, 2), F(1, 2)), (F(3, 4), F(3, 4)), 4, 1.0),
    ((F(3, 10), F(0)), (F(6, 10), F(1)), 4, math.e),
    ((0, 0, 0), (1, 1, 1), 5, 1.0),
])
def test_gamma_ab_examples(a, b, N, want):
    assert gamma_AB(a, b, N) == pytest.approx(want, rel=1e-15)


def test_ratio_conventions():
    assert dependence_ratio(F(0), F(0)) == 1
    assert dependence_ratio(F(1, 3), F(0)) == math.inf
    assert dependence_ratio(F(1, 2), F(1, 4)) == 2


def test_query_validation():
    with pytest.raises(ValueError):
        DependenceQuery(TestSet.anchored((1,)), set())
    with pytest.raises(ValueError):
        DependenceQuery(TestSet.anchored((1,)), {0})
    with pytest.raises(ValueError):
        exact_joint_lhs(DependenceQuery(TestSet.anchored((1,)), {3}), 1, 2)


def test_lhs_budget():
    q = DependenceQuery(lhs_test_set(4, F(1, 100)), {1, 2, 3, 4})
    with pytest.raises(BudgetExceeded):
        exact_joint_lhs(q, 4, 4, budget=1)


# --- oracle agreement ---------------------------------------------------------------

@settings(max_examples=80)
@given(lhs_queries())
def test_lhs_exact_matches_permutation_enumeration(nq):
    N, d, q = nq
    S = q.test_set
    joint, marg = oracles.lhs_joint(S.inner.upper, S.outer.upper, sorted(q.J), N,
                                    upper=q.side == UPPER)
    rep = exact_joint_lhs(q, d, N)
    assert rep.joint == joint
    assert all(m == q.event_probability(S.volume()) for m in marg)


NET_SETS = [
    (half_test_set(F(1, 10)), {1, 2, 3}),
    (TestSet.difference((F(1, 4), 0, F(1, 3)), (F(3, 4), F(2, 3), 1)), {1, 2}),
    (TestSet.anchored((F(1, 2), F(5, 8), F(7, 10))), {2, 3, 4}),
    (TestSet.anchored((F(1, 2), 1, 1)), {1, 4}),
]


@pytest.mark.parametrize("S,J", NET_SETS)
@pytest.mark.parametrize("symmetrize", [False, True])
def test_net_exact_matches_digit_map_enumeration(S, J, symmetrize):
    model = net_model("nested-uniform", symmetrize=symmetrize)
    joint, marg = oracles.nested_scrambled_joint(model.net.points, S.inner.upper,
                                                 S.outer.upper, sorted(J), 2, symmetrize)
    rep = exact_joint_scrambled_net(DependenceQuery(S, J), model)
    assert rep.joint == joint
    assert all(m == S.volume() for m in marg)


@pytest.mark.parametrize("nth", [0, 1])
def test_net_half_box_joint(nth):
    e = F(1, 1000)
    for name in ("nested-uniform", "positional-uniform", "affine-matrix"):
        rep = exact_joint_scrambled_net(DependenceQuery(half_test_set(e), {1, 2, 3}),
                                        net_model(name, nth=nth))
        assert rep.joint == e**3
        assert rep.ratio == net_ratio_analytic(e)


def test_lhs_four_points_half_box():
    e = F(1, 100)
    rep = exact_joint_lhs(DependenceQuery(half_test_set(e), {1, 2, 3}), 3, 4)
    assert rep.joint == F(2, 9) * e**3
    assert rep.ratio == lhs_vs_net_comparison(e)
    assert rep.ratio < 1 < net_ratio_analytic(e)


def test_pigeonhole_witness():
    net = canonical_net()
    S, J = pigeonhole_witness(net, 2)
    assert S.volume() == F(1, 2) and len(J) == 2
    unsym = exact_joint_scrambled_net(DependenceQuery(S, J), net_model("nested-uniform"))
    sym = exact_joint_scrambled_net(DependenceQuery(S, J),
                                    net_model("nested-uniform", symmetrize=True))
    assert unsym.ratio == 2
    assert sym.ratio == F(2, 3)


def test_uniform_marginals_of_scrambled_points():
    model = net_model("positional-linear")
    S = TestSet.anchored((F(1, 3), F(4, 5), F(1, 2)))
    for j in range(1, 5):
        assert exact_joint(DependenceQuery(S, {j}), model).joint == S.volume()


def test_full_cube_is_neutral():
    S = TestSet.anchored((1, 1, 1))
    for model in (RandomPointModel.lhs(3, 4), RandomPointModel.mc(3, 4),
                  net_model("nested-uniform")):
        rep = exact_joint(DependenceQuery(S, {1, 2, 3, 4}), model)
        assert rep.joint == rep.product == rep.ratio == 1


# --- properties ---------------------------------------------------------------------

@given(lhs_queries(), st.sampled_from(["lhs", "mc"]))
def test_singletons_are_neutral(nq, kind):
    N, d, q = nq
    single = DependenceQuery(q.test_set, {min(q.J)}, q.side)
    model = RandomPointModel.lhs(d, N) if kind == "lhs" else RandomPointModel.mc(d, N)
    assert exact_joint(single, model).ratio == 1


@settings(max_examples=20)
@given(st.sampled_from(NET_SETS), st.integers(1, 4), st.booleans(),
       st.sampled_from(["nested-uniform", "positional-shift", "affine-matrix"]))
def test_net_singletons_are_neutral(sj, j, sym, name):
    S, _ = sj
    assert exact_joint(DependenceQuery(S, {j}), net_model(name, symmetrize=sym)).ratio == 1


@settings(max_examples=150)
@given(st.sampled_from([2, 3]).flatmap(lambda n: lhs_queries(shapes=((n, n),))))
def test_lhs_ratio_below_gamma_ab(nq):
    N, d, q = nq
    r = exact_joint_lhs(q, d, N).ratio
    S = q.test_set
    assert float(r) <= gamma_AB(S.inner.upper, S.outer.upper, N) + 1e-12


@settings(max_examples=100)
@given(st.sampled_from([2, 3]).flatmap(lambda n: lhs_queries(shapes=((n, n),))))
def test_lhs_anchored_boxes_negatively_dependent(nq):
    N, d, q = nq
    anchored = DependenceQuery(TestSet.anchored(q.test_set.outer.upper), q.J, q.side)
    assert exact_joint_lhs(anchored, d, N).ratio <= 1


def test_family_monotonicity():
    model = RandomPointModel.lhs(2, 2)
    mesh = (F(1, 10), F(1, 100))
    c = correlation_number_search(model, family="C", eps_mesh=mesh)
    d = correlation_number_search(model, family="D", eps_mesh=mesh)
    assert c.ratio <= 1
    assert c.ratio <= d.ratio
    assert d.ratio == 2 / (1 + F(1, 100)) ** 2


def test_search_budget():
    with pytest.raises(BudgetExceeded):
        correlation_number_search(RandomPointModel.lhs(3, 3), budget=10)


@given(st.integers(2, 170))
def test_robbins_sandwich(d):
    event = lhs_ratio_analytic(d, F(1, 10 * d)).event_probability
    lo = math.sqrt(2 * math.pi * d) * math.exp(-d)
    assert lo < event < lo * math.exp(1 / (12 * d))


def test_robbins_sandwich_d1():
    lo = math.sqrt(2 * math.pi) / math.e
    assert lo < 1 < lo * math.exp(1 / 12)


@pytest.mark.parametrize("S,_J", NET_SETS)
def test_symmetrized_joint_invariant_under_labels(S, _J):
    sym = net_model("nested-uniform", symmetrize=True)
    vals = {exact_joint(DependenceQuery(S, J), sym).joint
            for J in ({1, 2}, {2, 3}, {1, 4}, {3, 4})}
    assert len(vals) == 1


def test_unsymmetrized_joint_depends_on_labels():
    model = net_model("nested-uniform")
    S, J = pigeonhole_witness(model.net, 2)
    others = {1, 2, 3, 4} - set(J)
    assert exact_joint(DependenceQuery(S, J), model).joint != \
        exact_joint(DependenceQuery(S, others | {min(J)}), model).joint


# --- estimator ----------------------------------------------------------------------

def test_estimator_independent_points_exact():
    q = DependenceQuery(half_test_set(F(1, 10)), {1, 2, 3})
    rep = mc_estimate_joint(q, RandomPointModel.mc(3, 4), 200, 1)
    assert rep.ratio == pytest.approx(1, abs=1e-12)
    assert rep.ci[1] - rep.ci[0] == pytest.approx(0, abs=1e-18)


def test_estimator_needs_reps():
    q = DependenceQuery(half_test_set(F(1, 10)), {1, 2, 3})
    with pytest.raises(ValueError):
        mc_estimate_joint(q, RandomPointModel.lhs(3, 4), 50, 1)


def test_estimator_d5_closed_form():
    e = F(1, 1000)
    q = DependenceQuery(lhs_test_set(5, e), {1, 2, 3, 4, 5})
    rep = mc_estimate_joint(q, RandomPointModel.lhs(5, 5), 200000, 7)
    want = lhs_ratio_analytic(5, e).ratio
    lo, hi = rep.ratio_ci
    assert lo <= want <= hi


def test_estimator_on_net_model():
    e = F(1, 10)
    q = DependenceQuery(half_test_set(e), {1, 2, 3})
    model = net_model("nested-uniform", symmetrize=True)
    exact = exact_joint(q, model).joint
    rep = mc_estimate_joint(q, model, 3000, 5)
    assert rep.ci[0] <= float(exact) <= rep.ci[1]


def test_estimator_deterministic():
    q = DependenceQuery(half_test_set(F(1, 10), 2), {1, 2})
    m = RandomPointModel.lhs(2, 2)
    assert mc_estimate_joint(q, m, 500, 3) == mc_estimate_joint(q, m, 500, 3)


def test_d4_oracle_matches_closed_form():
    e = F(1, 10**4)
    rep = exact_joint_lhs(DependenceQuery(lhs_test_set(4, e), {1, 2, 3, 4}), 4, 4)
    assert rep.joint == 24 * e**4
    assert math.isclose(float(rep.ratio), lhs_ratio_analytic(4, e).ratio, rel_tol=1e-12)
