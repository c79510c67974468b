import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morita_workbench.errors import MatchError
from morita_workbench.poisson import (Covector, MomentumMap, check_action_axioms, check_cotangent_groupoid,
                                      check_lagrangian_graph, cotangent_act, cotangent_compose, cotangent_source,
                                      cotangent_target, cotangent_unit, get_example)
from morita_workbench.poisson.cotangent import cotangent_inverse, matched_arrow_covector, pullback_by_inverse
from morita_workbench.poisson.examples import (aff1_group, affine_line_action, pair_groupoid, pair_left_action,
                                               perturbed_action)

seeds = st.integers(0, 2**32 - 1)


@given(seeds)
def test_pair_product_closed_form(seed):
    """On Pair(R^n), (xi, eta) at (t, s) times (-eta, eta') at (s, r) is (xi, eta') at (t, r)."""
    rng = np.random.default_rng(seed)
    n = 2
    G = pair_groupoid(n)
    t, s, r = (rng.uniform(-1, 1, n) for _ in range(3))
    xi, eta, eta2 = (rng.standard_normal(n) for _ in range(3))
    alpha = Covector("T*G", np.concatenate([t, s]), np.concatenate([xi, eta]))
    beta = Covector("T*G", np.concatenate([s, r]), np.concatenate([-eta, eta2]))
    gamma = cotangent_compose(G, alpha, beta)
    assert np.allclose(gamma.base, np.concatenate([t, r]))
    assert np.allclose(gamma.components, np.concatenate([xi, eta2]), atol=1e-6)


def test_unmatched_covectors_are_rejected():
    G = pair_groupoid(1)
    alpha = Covector("T*G", [0.1, 0.2], [1.0, 1.0])
    beta = Covector("T*G", [0.2, 0.3], [1.0, 1.0])
    with pytest.raises(MatchError):
        cotangent_compose(G, alpha, beta)


def test_source_and_target_of_pair_covector():
    G = pair_groupoid(1)
    alpha = Covector("T*G", [0.5, -0.5], [2.0, 3.0])
    assert np.allclose(cotangent_source(G, alpha).components, [3.0], atol=1e-9)
    # left-translation generators carry a minus sign: (a, t).(t, s) moves the first slot, negated
    assert np.allclose(cotangent_target(G, alpha).components, [-2.0], atol=1e-9)
    assert np.allclose(cotangent_source(G, alpha).base, [-0.5])


@given(seeds)
def test_group_action_is_pullback(seed):
    """For m -> a m + b the action on covectors is theta -> theta / a at a m + b."""
    rng = np.random.default_rng(seed)
    G, act = aff1_group(), affine_line_action()
    x = G.sample_arrow(rng)
    m, th = rng.uniform(-1, 1), rng.standard_normal()
    theta = Covector("T*M", [m], [th])
    alpha = matched_arrow_covector(G, x, MomentumMap(act)(theta).components, rng)
    out = cotangent_act(G, act, alpha, theta)
    assert np.allclose(out.base, [x[0] * m + x[1]])
    assert np.allclose(out.components, [th / x[0]], atol=1e-6)
    assert np.allclose(pullback_by_inverse(act, x, theta).components, out.components, atol=1e-6)


@given(seeds)
def test_pair_action_closed_form(seed):
    """(t, s).m = t on R^n: (xi, eta) at (t, s) acting on -eta at s gives xi at t."""
    rng = np.random.default_rng(seed)
    act = pair_left_action(2)
    t, s = rng.uniform(-1, 1, 2), rng.uniform(-1, 1, 2)
    xi, eta = rng.standard_normal(2), rng.standard_normal(2)
    alpha = Covector("T*G", np.concatenate([t, s]), np.concatenate([xi, eta]))
    out = cotangent_act(act.groupoid, act, alpha, Covector("T*M", s, -eta))
    assert np.allclose(out.base, t) and np.allclose(out.components, xi, atol=1e-6)


def test_unit_covector_acts_trivially():
    act = pair_left_action(2)
    G = act.groupoid
    theta = Covector("T*M", [0.3, -0.2], [1.0, -2.0])
    unit = cotangent_unit(G, [0.3, -0.2], MomentumMap(act)(theta).components)
    out = cotangent_act(G, act, unit, theta)
    assert np.allclose(out.point, theta.point, atol=1e-8)


def test_inverse_swaps_source_and_target():
    G = aff1_group()
    alpha = Covector("T*G", [1.3, 0.4], [0.7, -1.1])
    inv = cotangent_inverse(G, alpha)
    assert np.allclose(cotangent_source(G, inv).components, cotangent_target(G, alpha).components, atol=1e-8)
    assert np.allclose(cotangent_target(G, inv).components, cotangent_source(G, alpha).components, atol=1e-8)


@pytest.mark.parametrize("name", ["pair:2", "aff1", "aff1-on-line", "rect:2x3", "unit:2", "translation-on-line"])
def test_cotangent_groupoid_laws(name):
    rep = check_cotangent_groupoid(get_example(name).groupoid, samples=5)
    assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("name", ["pair:2", "aff1", "aff1-on-line", "rect:2x3", "translation-on-line"])
def test_action_axioms(name):
    ex = get_example(name)
    rep = check_action_axioms(ex.groupoid, ex.left, samples=8)
    assert rep.passed, rep.to_dict()


def test_perturbed_action_breaks_moment_compatibility():
    act = perturbed_action(affine_line_action())
    rep = check_action_axioms(act.groupoid, act, samples=8)
    assert not rep.passed and rep.residuals["tcon"] > 1e-2


@pytest.mark.parametrize("name", ["pair:1", "pair:2", "aff1-on-line", "rect:1x2", "translation-on-line"])
def test_lagrangian_graph(name):
    ex = get_example(name)
    rep = check_lagrangian_graph(ex.groupoid, ex.left, samples=4)
    assert rep.passed, rep.to_dict()
    n1, d = ex.groupoid.arrow_dim, ex.left.dim
    assert rep.details["ambient_dim"] == 2 * n1 + 4 * d
    assert rep.details["graph_dim"] == n1 + 2 * d


def test_lagrangian_graph_of_perturbed_action_fails():
    act = perturbed_action(affine_line_action(), eps=0.3)
    rep = check_lagrangian_graph(act.groupoid, act, samples=3)
    assert not rep.passed
