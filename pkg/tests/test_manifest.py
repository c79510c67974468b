import json

import numpy as np
import pytest

from morita_workbench.errors import AxiomError, DomainError, ParseError
from morita_workbench.poisson import (MomentumMap, check_action_axioms, check_algebroid, check_anti_poisson,
                                      check_lagrangian_graph, load_manifest, validate_manifest)
from morita_workbench.poisson.manifest import compile_map

AFF1 = {
    "name": "aff(1)", "base_dim": 0, "arrow_dim": 2, "source": [], "target": [],
    "compose": ["x[0]*y[0]", "x[0]*y[1] + x[1]"], "inverse": ["1/x[0]", "-x[1]/x[0]"], "unit": ["1", "0"],
    "arrow_from_source": ["exp(r[0])", "r[1]"], "free_box": [[-0.7, 0.7], [-1, 1]],
    "left_action": {"dim": 1, "base_map": [], "act": ["x[0]*m[0] + x[1]"]},
}


def test_compile_map_arithmetic():
    f = compile_map(["x[0]**2 - 3*y[1]", "exp(x[0]) / 2", "-log(y[0])"], ["x", "y"], 3)
    assert np.allclose(f(np.array([1.0]), np.array([2.0, 1.0])), [-2.0, np.e / 2, -np.log(2.0)])


@pytest.mark.parametrize("expr", ["__import__('os')", "x.real", "x[0] if x[0] else 1", "[1][0]", "sin(x[0])",
                                  "x[0:1]", "lambda: 1", "q[0]", "True"])
def test_whitelist_rejects(expr):
    with pytest.raises(ParseError):
        compile_map([expr], ["x"])


def test_domain_errors():
    f = compile_map(["log(x[0])", "1/x[1]"], ["x"])
    with pytest.raises(DomainError):
        f(np.array([-1.0, 1.0]))
    with pytest.raises(DomainError):
        f(np.array([1.0, 0.0]))
    with pytest.raises(ParseError):
        compile_map(["x[5]"], ["x"])(np.zeros(2))


def test_wrong_arity():
    with pytest.raises(ParseError):
        compile_map(["x[0]"], ["x"], out_dim=2)


def test_load_from_dict_text_and_path(tmp_path):
    path = tmp_path / "aff1.json"
    path.write_text(json.dumps(AFF1))
    for src in (AFF1, json.dumps(AFF1), path, str(path)):
        loaded = load_manifest(src)
        assert loaded["groupoid"].arrow_dim == 2 and loaded["left"].dim == 1


def test_manifest_matches_builtin_affine_action():
    loaded = load_manifest(AFF1)
    validate_manifest(loaded)
    c = check_algebroid(loaded["groupoid"], samples=3).details["structure_at_center"]
    assert c[0, 1, 1] == pytest.approx(1.0, abs=1e-6)
    rep = check_anti_poisson(MomentumMap(loaded["left"]), samples=10)
    assert rep.passed


def test_non_associative_manifest_is_an_axiom_error():
    bad = dict(AFF1, compose=["x[0]*y[0]", "x[1]*y[0] + y[1]"])
    with pytest.raises(AxiomError):
        validate_manifest(load_manifest(bad))


def test_missing_key_and_bad_json():
    bad = dict(AFF1)
    del bad["inverse"]
    with pytest.raises(ParseError):
        load_manifest(bad)
    with pytest.raises(ParseError):
        load_manifest("{not json")


@pytest.mark.parametrize("name", ["scaling_action.json", "aff1_on_line.json", "aff1_action_groupoid.json"])
def test_corpus_manifests_pass_every_applicable_check(manifest_dir, name):
    loaded = load_manifest(manifest_dir / name)
    validate_manifest(loaded)
    G, act = loaded["groupoid"], loaded["left"]
    assert check_algebroid(G, samples=3).passed
    assert check_anti_poisson(MomentumMap(act), samples=10).passed
    assert check_action_axioms(G, act, samples=6).passed
    assert check_lagrangian_graph(G, act, samples=3).passed
