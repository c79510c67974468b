import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morita_workbench.errors import ParseError
from morita_workbench.parallel import ENV_VAR, ordered_map, sample_rngs, worker_count
from morita_workbench.report import CheckReport, document, dumps, jsonable, merge, parse_text, render_text

keys = st.text(st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=8)
leaves = st.one_of(st.none(), st.booleans(), st.integers(-10**6, 10**6),
                   st.floats(allow_nan=False, allow_infinity=False), st.text(max_size=10))
trees = st.recursive(leaves, lambda inner: st.one_of(st.lists(inner, max_size=3),
                                                     st.dictionaries(keys, inner, max_size=3)), max_leaves=12)


@given(st.dictionaries(keys, trees, max_size=4))
def test_text_rendering_roundtrips(sections):
    doc = document("poisson", sections, True, 0, {"seed": 1})
    assert parse_text(render_text(doc)) == json.loads(dumps(doc))


def test_comment_lines_are_ignored():
    doc = document("x", {"a": {"b": 1}}, True, 0)
    assert parse_text("# PASS  a\n" + render_text(doc)) == doc


def test_non_finite_numbers_become_strings():
    rep = CheckReport("c", False, float("inf"), 1e-6, 3, {"r": float("nan")})
    d = rep.to_dict()
    assert d["max_residual"] == "inf" and d["residuals"]["r"] == "nan"
    json.dumps(d, allow_nan=False)


def test_jsonable_handles_numpy():
    out = jsonable({"a": np.arange(3), "b": np.float64(0.5), 1: (np.int64(2),)})
    assert out == {"a": [0, 1, 2], "b": 0.5, "1": [2]}


def test_dumps_is_sorted_and_stable():
    a = dumps(document("c", {"z": 1, "a": 2}, True, 0))
    b = dumps(document("c", {"a": 2, "z": 1}, True, 0))
    assert a == b and a.index('"a"') < a.index('"z"')


def test_merge():
    d1 = document("poisson", {"x": 1}, True, 0)
    d2 = document("morita", {"y": 2}, False, 4)
    m = merge([d1, d2], ["one", "one"])
    assert list(m["sections"]) == ["one", "one#2"] and m["pass"] is False
    with pytest.raises(ParseError):
        merge([])
    with pytest.raises(ParseError):
        merge([{"schema_version": 99}])


def test_sample_rngs_are_independent_of_order():
    a = [r.random() for r in sample_rngs(5, 4)]
    b = [r.random() for r in sample_rngs(5, 4)]
    assert a == b and len(set(a)) == 4


def test_ordered_map_with_threads(monkeypatch):
    monkeypatch.setenv(ENV_VAR, "4")
    assert worker_count() == 4
    assert ordered_map(lambda v: v * v, range(20)) == [v * v for v in range(20)]
    monkeypatch.setenv(ENV_VAR, "junk")
    assert worker_count() == 1
