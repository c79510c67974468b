import numpy as np
import pytest

from morita_workbench.poisson import algebroid_frame, algebroid_from_groupoid, check_algebroid, get_example
from morita_workbench.poisson.algebroid import (algebroid_identity_residuals, anchor_matrix, bracket_of_sections,
                                                from_annihilator, structure_functions, to_annihilator)
from morita_workbench.poisson.charts import tangent_chart
from morita_workbench.poisson.examples import aff1_group, pair_groupoid, translation_group, unit_groupoid
from morita_workbench.poisson.manifest import load_manifest


def test_pair_algebroid_is_tangent_bundle():
    G = pair_groupoid(3)
    q = np.array([0.2, -0.4, 0.9])
    K = algebroid_frame(G, q)
    # ker Dt is the source block
    assert np.allclose(K[:3], 0) and np.allclose(K[3:], np.eye(3))
    assert np.allclose(anchor_matrix(G, q), np.eye(3), atol=1e-9)
    assert np.allclose(structure_functions(G, q), 0, atol=1e-8)


def test_aff1_structure_constants():
    c = structure_functions(aff1_group(), np.zeros(0))
    assert c[0, 1, 1] == pytest.approx(1.0, abs=1e-7)
    assert c[1, 0, 1] == pytest.approx(-1.0, abs=1e-7)
    assert abs(c[0, 1, 0]) < 1e-7


def test_translation_group_is_abelian():
    assert np.allclose(structure_functions(translation_group(2), np.zeros(0)), 0, atol=1e-9)


def test_unit_groupoid_has_rank_zero_algebroid():
    G = unit_groupoid(2)
    assert G.fiber_dim == 0
    assert algebroid_frame(G, [0.1, 0.2]).shape == (2, 0)


def test_action_groupoid_from_manifest(manifest_dir):
    # aff(1) acting on the line: arrows (a, b, p) from p to a p + b
    G = load_manifest(manifest_dir / "aff1_action_groupoid.json")["groupoid"]
    chart = algebroid_from_groupoid(G)
    q = np.array([0.4])
    # infinitesimal generators of m -> a m + b at q, in the normalised frame
    a = chart.anchor(q)
    c = chart.structure(q)
    assert a.shape == (1, 2)
    res = algebroid_identity_residuals(chart, q)
    assert res["jacobi"] < 1e-5 and res["anchor-morphism"] < 1e-5 and res["antisymmetry"] == 0


def test_annihilator_roundtrip():
    G = pair_groupoid(2)
    q, mu = np.array([0.3, -0.1]), np.array([1.5, -2.0])
    alpha = to_annihilator(G, q, mu)
    assert np.allclose(from_annihilator(G, alpha).components, mu)
    # vanishes on the unit directions
    assert np.allclose(alpha.components @ np.vstack([np.eye(2), np.eye(2)]), 0)


def test_bracket_of_vector_fields_on_tangent_chart():
    chart = tangent_chart(2)
    X = lambda q: np.array([q[1], 0.0])
    Y = lambda q: np.array([0.0, q[0]])
    q = np.array([0.7, -0.3])
    # [X, Y] = X(Y) - Y(X) = (-q0, q1)
    assert np.allclose(bracket_of_sections(chart, X, Y, q), [-q[0], q[1]], atol=1e-8)


@pytest.mark.parametrize("name", ["pair:2", "aff1", "rect:2x3", "unit:2", "translation-on-line"])
def test_check_algebroid_against_closed_forms(name):
    ex = get_example(name)
    rep = check_algebroid(ex.groupoid, samples=5, expected=ex.expected)
    assert rep.passed, rep.to_dict()


def test_check_algebroid_flags_wrong_closed_form():
    ex = get_example("aff1")
    wrong = dict(ex.expected, structure=-ex.expected["structure"])
    rep = check_algebroid(ex.groupoid, samples=3, expected=wrong)
    assert not rep.passed
    assert rep.residuals["structure-vs-expected"] == pytest.approx(2.0, abs=1e-6)
