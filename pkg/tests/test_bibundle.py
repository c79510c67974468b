import json

import numpy as np
import pytest

from morita_workbench import (bibundle_to_dict, check_equivalence, make_builtin, rectangle_bibundle,
                              translation_bibundle, validate_bibundle)
from morita_workbench.bibundle import (check_principality, find_equivalence_bibundle, left_translation_bibundle,
                                       quotient_by_left, quotient_by_right, swap_bibundle)
from morita_workbench.errors import AxiomError, ParseError


def rect(n, k):
    return rectangle_bibundle(make_builtin(f"pair:{n}"), make_builtin(f"pair:{k}"))


def test_rectangle_is_an_equivalence():
    B = rect(2, 3)
    assert B.n_points == 6
    rep = check_equivalence(B)
    assert rep.passed, rep.to_dict()


def test_quotients_of_rectangle():
    B = rect(2, 3)
    n_right, _ = quotient_by_right(B)
    n_left, _ = quotient_by_left(B)
    assert (n_right, n_left) == (2, 3)


@pytest.mark.parametrize("name", ["cyclic:2", "s3", "pair:3", "unit:2"])
def test_self_translation_is_an_equivalence(name):
    assert check_equivalence(translation_bibundle(make_builtin(name))).passed


def test_swap_of_equivalence_is_equivalence():
    S = swap_bibundle(rect(2, 3))
    assert S.G.n_objects == 3 and S.H.n_objects == 2
    assert check_equivalence(S).passed


def test_left_translation_against_units_is_not_an_equivalence():
    G = make_builtin("pair:2")
    B = left_translation_bibundle(G, make_builtin("unit:2"))
    rep = check_equivalence(B)
    assert not rep.passed
    assert [c.name for c in rep.failing()] == ["M/H = G_0 via tau"]


def test_trivial_action_is_not_free():
    # Z2 acting trivially on one point
    G = make_builtin("cyclic:2")
    raw = {"points": 1, "tau": [0], "sigma": [0], "left_act": [[0, 0, 0], [1, 0, 0]], "right_act": [[0, 0, 0]]}
    B = validate_bibundle(G, make_builtin("unit:1"), raw)
    rep = check_principality(B, "left")
    assert not rep.free and rep.witnesses["fixed_point"] == {"arrow": 1, "point": 0}


def test_json_roundtrip():
    B = rect(2, 3)
    again = validate_bibundle(B.G, B.H, json.dumps(bibundle_to_dict(B)))
    assert np.array_equal(again.left, B.left) and np.array_equal(again.right, B.right)


def test_broken_commutation_is_an_axiom_error():
    B = rect(2, 2)
    raw = bibundle_to_dict(B)
    # send (0, 0).(0 <- 1) to the wrong point of the same sigma fibre
    raw["right_act"] = [[m, h, (2 if (m, h) == (1, 2) else mh)] for m, h, mh in raw["right_act"]]
    with pytest.raises(AxiomError):
        validate_bibundle(B.G, B.H, raw)


def test_missing_fields():
    G = make_builtin("unit:1")
    with pytest.raises(ParseError):
        validate_bibundle(G, G, {"points": 1})


def test_no_equivalence_between_pair2_and_unit2():
    assert find_equivalence_bibundle(make_builtin("pair:2"), make_builtin("unit:2"), max_points=4) is None


def test_search_finds_an_equivalence_for_pair2_and_point():
    B = find_equivalence_bibundle(make_builtin("pair:2"), make_builtin("unit:1"), max_points=2)
    assert B is not None and check_equivalence(B).passed
