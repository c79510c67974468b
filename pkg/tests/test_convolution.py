import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morita_workbench import block_count, convolve, cstar_norm, involute, make_builtin, morita_oracle
from morita_workbench.convolution import (delta, element, element_from_json, random_element, regular_representation,
                                          relative_residual)
from morita_workbench.errors import GroupoidMismatch, ParseError
from morita_workbench.groupoid import action_groupoid, cyclic_table, disjoint_union

seeds = st.integers(0, 2**32 - 1)


def as_matrix(f):
    """Pair-groupoid element as the matrix F[t(a), s(a)] = f(a), read from the arrow data."""
    G = f.groupoid
    F = np.zeros((G.n_objects, G.n_objects), dtype=complex)
    F[G.tgt, G.src] = f.values
    return F


@given(st.integers(1, 5), seeds)
def test_pair_convolution_is_matrix_product(n, seed):
    G = make_builtin(f"pair:{n}")
    rng = np.random.default_rng(seed)
    f, g = random_element(G, rng), random_element(G, rng)
    assert np.allclose(as_matrix(convolve(f, g)), as_matrix(f) @ as_matrix(g), atol=1e-12)
    assert np.allclose(as_matrix(involute(f)), as_matrix(f).conj().T)
    assert cstar_norm(f) == pytest.approx(np.linalg.norm(as_matrix(f), 2), rel=1e-12)


@given(st.integers(1, 7), seeds)
def test_cyclic_convolution_matches_fft(n, seed):
    G = make_builtin(f"cyclic:{n}")
    rng = np.random.default_rng(seed)
    f, g = random_element(G, rng), random_element(G, rng)
    expected = np.fft.ifft(np.fft.fft(f.values) * np.fft.fft(g.values))
    assert np.allclose(convolve(f, g).values, expected, atol=1e-10)
    assert cstar_norm(f) == pytest.approx(np.max(np.abs(np.fft.fft(f.values))), rel=1e-10)


@given(st.integers(1, 5), seeds)
def test_unit_groupoid_algebra_is_pointwise(n, seed):
    G = make_builtin(f"unit:{n}")
    rng = np.random.default_rng(seed)
    f, g = random_element(G, rng), random_element(G, rng)
    assert np.allclose(convolve(f, g).values, f.values * g.values)
    assert cstar_norm(f) == pytest.approx(np.max(np.abs(f.values)))


GROUPOIDS = ["pair:2", "pair:3", "unit:2", "cyclic:3", "s3"]


@pytest.mark.parametrize("name", GROUPOIDS)
@given(seed=seeds)
def test_star_algebra_identities(name, seed):
    G = make_builtin(name)
    rng = np.random.default_rng(seed)
    f, g, h = (random_element(G, rng) for _ in range(3))
    assert relative_residual(convolve(convolve(f, g), h).values, convolve(f, convolve(g, h)).values) < 1e-12
    assert relative_residual(involute(convolve(f, g)).values, convolve(involute(g), involute(f)).values) < 1e-12
    assert np.allclose(involute(involute(f)).values, f.values)
    n = cstar_norm(f)
    assert cstar_norm(convolve(involute(f), f)) == pytest.approx(n * n, rel=1e-9)


def test_regular_representation_is_multiplicative():
    G = make_builtin("s3")
    rng = np.random.default_rng(1)
    f, g = random_element(G, rng), random_element(G, rng)
    R = regular_representation(G)
    assert np.allclose(R.matrix(convolve(f, g)), R.matrix(f) @ R.matrix(g))
    assert np.allclose(R.matrix(involute(f)), R.matrix(f).conj().T)


@pytest.mark.parametrize("name,blocks", [("pair:2", 1), ("pair:3", 1), ("pair:5", 1), ("unit:1", 1), ("unit:4", 4),
                                          ("cyclic:3", 3), ("cyclic:4", 4), ("s3", 3)])
def test_block_counts(name, blocks):
    assert block_count(make_builtin(name)) == blocks


def test_block_count_adds_over_disjoint_unions():
    G = disjoint_union(make_builtin("pair:2"), make_builtin("s3"), make_builtin("unit:2"))
    assert block_count(G) == 1 + 3 + 2


def test_block_count_of_action_groupoid():
    # Z2 swapping two points: free transitive, algebra is M_2
    G = action_groupoid(cyclic_table(2), [[0, 1], [1, 0]])
    assert block_count(G) == 1
    # Z2 fixing both points: two copies of C[Z2]
    H = action_groupoid(cyclic_table(2), [[0, 1], [0, 1]])
    assert block_count(H) == 4


def test_oracle():
    assert morita_oracle(make_builtin("pair:2"), make_builtin("pair:5"))
    assert not morita_oracle(make_builtin("pair:2"), make_builtin("unit:2"))
    assert morita_oracle(make_builtin("unit:2"), make_builtin("cyclic:2"))


def test_pair_basis_is_matrix_units():
    n = 3
    G = make_builtin(f"pair:{n}")
    for a in range(G.n_arrows):
        E = as_matrix(delta(G, a))
        assert E.sum() == 1 and E[G.tgt[a], G.src[a]] == 1
        for b in range(G.n_arrows):
            prod = as_matrix(convolve(delta(G, a), delta(G, b)))
            assert np.array_equal(prod, E @ as_matrix(delta(G, b)))


def test_mixing_groupoids_is_rejected():
    with pytest.raises(GroupoidMismatch):
        convolve(element(make_builtin("pair:2"), np.ones(4)), element(make_builtin("cyclic:4"), np.ones(4)))


def test_element_json_roundtrip():
    G = make_builtin("cyclic:3")
    f = element(G, [1 + 2j, -0.5, 3j])
    assert np.array_equal(element_from_json(G, f.to_json()).values, f.values)
    with pytest.raises(ParseError):
        element_from_json(G, "[[1]]")
