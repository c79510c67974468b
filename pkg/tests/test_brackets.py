import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morita_workbench.poisson import (algebroid_from_groupoid, canonical_bracket, check_bracket_match, check_jacobi,
                                      lie_poisson_bracket, poisson_bivector)
from morita_workbench.poisson.brackets import canonical_bivector, jacobiator, lie_poisson
from morita_workbench.poisson.charts import (basic_field, constant_chart, generic_field, lie_algebra_chart,
                                             linear_field, tangent_chart)
from morita_workbench.poisson.examples import aff1_group, pair_groupoid
from morita_workbench.errors import InvalidParameter

points = st.lists(st.floats(-1.5, 1.5), min_size=4, max_size=4).map(np.array)


def so3_structure():
    c = np.zeros((3, 3, 3))
    for i, j, k in [(0, 1, 2), (1, 2, 0), (2, 0, 1)]:
        c[i, j, k], c[j, i, k] = 1.0, -1.0
    return c


def test_linear_functions_bracket_to_structure_constants():
    chart = lie_algebra_chart(so3_structure())
    mu = np.array([0.3, -0.7, 1.1])
    e = np.eye(3)
    F, G = linear_field(lambda q: e[0], 0), linear_field(lambda q: e[1], 0)
    # {mu_0, mu_1} = mu . [e0, e1] = mu_2
    assert lie_poisson_bracket(chart, F, G, mu, route="tagged") == pytest.approx(mu[2])
    assert lie_poisson_bracket(chart, F, G, mu, route="bivector") == pytest.approx(mu[2], abs=1e-9)


def test_so3_casimir_commutes_with_everything():
    chart = lie_algebra_chart(so3_structure())
    casimir = generic_field(lambda mu: mu @ mu)
    other = generic_field(lambda mu: np.sin(mu[0]) * mu[2])
    assert abs(lie_poisson_bracket(chart, casimir, other, [0.2, 0.5, -0.4])) < 1e-9


def test_basic_functions_commute():
    chart = tangent_chart(2)
    f = basic_field(lambda q: q[0] ** 2, 2)
    g = basic_field(lambda q: np.exp(q[1]), 2)
    assert lie_poisson_bracket(chart, f, g, [0.1, 0.2, 3.0, 4.0]) == 0.0


def test_linear_basic_is_anchor_derivative():
    a = np.array([[1.0, 2.0]])
    chart = constant_chart(a, np.zeros((2, 2, 2)))
    sigma = linear_field(lambda q: np.array([1.0, 1.0]), 1)
    f = basic_field(lambda q: q[0] ** 2, 1)
    z = np.array([0.5, 1.0, -1.0])
    # (a sigma) f = 3 * 2 q
    assert lie_poisson_bracket(chart, sigma, f, z, route="tagged") == pytest.approx(3.0)
    assert lie_poisson_bracket(chart, sigma, f, z, route="bivector") == pytest.approx(3.0, abs=1e-8)


@given(points)
def test_tangent_chart_bracket_is_canonical(z):
    chart = tangent_chart(2)
    F = generic_field(lambda p: p[0] * p[3] + np.cos(p[1] * p[2]))
    G = generic_field(lambda p: p[2] ** 2 - p[0] * p[1] * p[3])
    assert lie_poisson_bracket(chart, F, G, z) == pytest.approx(canonical_bracket(F, G, z), abs=1e-7)


def test_canonical_bracket_of_coordinates():
    q0 = generic_field(lambda z: z[0])
    p0 = generic_field(lambda z: z[2])
    assert canonical_bracket(p0, q0, np.zeros(4)) == pytest.approx(1.0)
    assert np.allclose(canonical_bivector(1), [[0, -1], [1, 0]])


def test_bivector_is_antisymmetric():
    chart = algebroid_from_groupoid(aff1_group())
    P = poisson_bivector(chart, [0.4, -1.3])
    assert np.allclose(P, -P.T)


def exact_linear_jacobiator(c, mu):
    """sum over cyclic (i, j, k) of {mu_i, {mu_j, mu_k}} with {mu_i, mu_j} = c[i, j] . mu."""
    i, j, k = 0, 1, 2
    total = 0.0
    for a, b, d in ((i, j, k), (j, k, i), (k, i, j)):
        total += sum(c[b, d, l] * (c[a, l] @ mu) for l in range(3))
    return total


def test_jacobiator_vanishes_on_so3_and_not_on_broken_constants():
    coords = [generic_field(lambda mu, i=i: mu[i]) for i in range(3)]
    z = np.array([0.3, 0.2, -0.5])
    good = lie_algebra_chart(so3_structure())
    assert abs(jacobiator(lie_poisson(good), *coords, z)) < 1e-8
    c = so3_structure()
    c[0, 1, 0], c[1, 0, 0] = 1.0, -1.0  # antisymmetric but violates Jacobi
    expected = exact_linear_jacobiator(c, z)
    assert abs(expected) > 0.1
    assert jacobiator(lie_poisson(lie_algebra_chart(c)), *coords, z) == pytest.approx(expected, abs=1e-7)
    F = generic_field(lambda mu: mu[0] * mu[1])
    G = generic_field(lambda mu: np.exp(mu[2]))
    K = generic_field(lambda mu: mu[0] ** 2 + mu[1])
    assert abs(jacobiator(lie_poisson(good), F, G, K, z)) < 1e-6


def test_check_jacobi_on_aff1_dual():
    rep = check_jacobi(algebroid_from_groupoid(aff1_group()), samples=20)
    assert rep.passed and rep.max_residual < 1e-5


def test_check_bracket_match_on_pair_chart():
    rep = check_bracket_match(algebroid_from_groupoid(pair_groupoid(2)), samples=20)
    assert rep.passed and rep.max_residual < 1e-5


def test_unknown_route():
    with pytest.raises(InvalidParameter):
        lie_poisson_bracket(tangent_chart(1), lambda z: z[0], lambda z: z[1], [0, 0], route="magic")
