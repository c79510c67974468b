import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morita_workbench.errors import InvalidParameter
from morita_workbench.poisson import (Covector, MomentumMap, check_anti_poisson, check_poisson_property, get_example,
                                      momentum_left, momentum_right)
from morita_workbench.poisson.examples import affine_line_action, pair_left_action, rectangle_bibundle

floats = st.floats(-1, 1)


@given(floats, floats)
def test_affine_line_momentum_closed_form(m, th):
    # generators of m -> a m + b at the identity: d/da = m, d/db = 1
    J = momentum_left(affine_line_action(), Covector("T*M", [m], [th]))
    assert J.base.size == 0
    assert np.allclose(J.components, [th * m, th], atol=1e-9)


@given(st.lists(floats, min_size=4, max_size=4))
def test_pair_momentum_closed_form(v):
    m, th = np.array(v[:2]), np.array(v[2:])
    J = momentum_left(pair_left_action(2), Covector("T*M", m, th))
    assert np.allclose(J.base, m) and np.allclose(J.components, -th, atol=1e-9)


def test_rectangle_momentum_maps():
    bib = rectangle_bibundle(2, 3)
    m = np.array([0.1, 0.2, -0.3, 0.4, 0.5])
    th = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    JL = MomentumMap(bib.left).coords(np.concatenate([m, th]))
    JR = MomentumMap(bib.right).coords(np.concatenate([m, th]))
    assert np.allclose(JL, np.concatenate([m[:2], -th[:2]]), atol=1e-9)
    assert np.allclose(JR, np.concatenate([m[2:], th[2:]]), atol=1e-9)


def test_side_mismatch():
    bib = rectangle_bibundle(1, 1)
    theta = Covector("T*M", [0.0, 0.0], [1.0, 1.0])
    with pytest.raises(InvalidParameter):
        momentum_right(bib.left, theta)
    with pytest.raises(InvalidParameter):
        momentum_left(bib.right, theta)
    with pytest.raises(ValueError):
        check_anti_poisson(MomentumMap(bib.right))


@pytest.mark.parametrize("name", ["pair:2", "aff1-on-line", "aff1", "rect:2x3", "translation-on-line"])
def test_left_momentum_maps_are_anti_poisson(name):
    rep = check_anti_poisson(MomentumMap(get_example(name).left), samples=10)
    assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("name", ["aff1", "rect:2x3", "unit:2"])
def test_right_momentum_maps_are_poisson(name):
    rep = check_poisson_property(MomentumMap(get_example(name).right), samples=10)
    assert rep.passed, rep.to_dict()


@pytest.mark.parametrize("name", ["pair:2", "aff1-on-line"])
def test_sign_flip_is_detected(name):
    J = MomentumMap(get_example(name).left).flipped()
    rep = check_anti_poisson(J, samples=10)
    assert not rep.passed and rep.max_residual >= 10 * rep.tol
