import numpy as np
import pytest
from hypothesis import given, strategies as st

from fprate.errors import DimensionMismatch, IndexOutOfRange, InvalidCounts, InvalidSimplex, OutOfPolytope
from fprate.game import (
    expected_potential,
    expected_potential_expanded,
    expected_utility,
    from_simplex,
    kappa,
    to_simplex,
    validate_game,
    vertex_profile,
)
from fprate.potential import sample_potential_game

from oracles import brute_multilinear, x_to_sigmas


def test_validate_game_ok():
    g = validate_game({"players": 2, "actions": [2, 2], "utilities": [[1, 0, 0, 1], [1, 0, 0, 1]]})
    assert g.actions == (2, 2)
    assert g.utilities[0][1, 1] == 1


def test_validate_game_row_major():
    g = validate_game({"actions": [2, 3], "utilities": [list(range(6)), list(range(6))]})
    # last player's index varies fastest
    assert g.utilities[0][0, 2] == 2
    assert g.utilities[0][1, 0] == 3


def test_validate_game_errors():
    with pytest.raises(DimensionMismatch):
        validate_game({"players": 2, "actions": [2, 2], "utilities": [[1, 0, 0], [1, 0, 0, 1]]})
    with pytest.raises(InvalidCounts):
        validate_game({"players": 1, "actions": [2], "utilities": [[1, 0]]})
    with pytest.raises(InvalidCounts):
        validate_game({"players": 2, "actions": [2, 1], "utilities": [[1, 0], [1, 0]]})


def test_to_simplex_examples():
    s = to_simplex((2, 2), [0.3, 0.0])
    np.testing.assert_allclose(s[0], [0.7, 0.3])
    s = to_simplex((3, 2), [0.0, 0.0, 0.0])
    np.testing.assert_array_equal(s[0], [1, 0, 0])
    with pytest.raises(OutOfPolytope):
        to_simplex((3, 2), [0.6, 0.6, 0.0])


def test_from_simplex_examples():
    np.testing.assert_array_equal(from_simplex([[1, 0], [1, 0]]), [0, 0])
    np.testing.assert_allclose(from_simplex([[0.25, 0.25, 0.5]]), [0.25, 0.5])
    with pytest.raises(InvalidSimplex):
        from_simplex([[0.5, 0.6]])


@st.composite
def xprofiles(draw, max_players=3):
    n = draw(st.integers(2, max_players))
    actions = tuple(draw(st.integers(2, 4)) for _ in range(n))
    blocks = []
    for k in actions:
        w = np.array(draw(st.lists(st.floats(0.0, 1.0), min_size=k, max_size=k)))
        w = w + 1e-3
        blocks.append((w / w.sum())[1:])
    return actions, np.concatenate(blocks)


@given(xprofiles())
def test_bijection(data):
    actions, x = data
    back = from_simplex(to_simplex(actions, x))
    assert np.max(np.abs(back - x)) <= 1e-14


@pytest.mark.parametrize("counts,expected", [((2, 2), 2), ((3, 3), 4), ((2, 3, 4), 6)])
def test_kappa(counts, expected):
    assert kappa(counts) == expected


def test_vertex_profile():
    np.testing.assert_array_equal(vertex_profile((2, 2), (0, 0)), [0, 0])
    np.testing.assert_array_equal(vertex_profile((2, 2), (1, 1)), [1, 1])
    np.testing.assert_array_equal(vertex_profile((3, 2), (1, 0)), [1, 0, 0])
    with pytest.raises(IndexOutOfRange):
        vertex_profile((2, 2), (2, 0))


def test_expected_utility_coordination(coord):
    assert expected_utility(coord.game, 0, [[1, 0], [1, 0]]) == 1.0
    assert expected_utility(coord.game, 1, [[0.5, 0.5], [0.5, 0.5]]) == pytest.approx(0.5, abs=1e-15)


def test_expected_utility_pure_profile():
    pg = sample_potential_game((2, 3, 2), seed=3)
    for y in np.ndindex(2, 3, 2):
        sig = [np.eye(k)[a] for k, a in zip((2, 3, 2), y)]
        assert expected_utility(pg.game, 2, sig) == pg.game.utilities[2][y]


@pytest.mark.parametrize("x,expected", [((0, 0), 1.0), ((0.5, 0.5), 0.5), ((1, 0), 0.0)])
def test_expected_potential_coordination(coord, x, expected):
    # U = (1 - x1)(1 - x2) + x1 x2
    assert expected_potential(coord, x) == pytest.approx(expected, abs=1e-15)


@given(xprofiles(), st.integers(0, 10_000))
def test_multilinear_consistency_and_bounds(data, seed):
    actions, x = data
    pg = sample_potential_game(actions, seed)
    u = expected_potential(pg, x)
    assert u == pytest.approx(brute_multilinear(pg.potential, x_to_sigmas(actions, x)), abs=1e-12)
    for i in range(len(actions)):
        assert abs(expected_potential_expanded(pg, x, i) - u) <= 1e-12
    assert pg.potential.min() - 1e-12 <= u <= pg.potential.max() + 1e-12


def test_vertex_agreement():
    pg = sample_potential_game((3, 2, 2), seed=11)
    for y in np.ndindex(*pg.actions):
        assert expected_potential(pg, vertex_profile(pg.game, y)) == pg.potential[y]
