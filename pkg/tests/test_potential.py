import numpy as np
import pytest
from hypothesis import given, strategies as st

from fprate.errors import DimensionMismatch, NotPotentialGame
from fprate.game import Game, as_tensor, validate_game
from fprate.potential import (
    check_exact_potential,
    cycle_violation,
    extract_potential,
    param_dim,
    sample_potential_game,
)

MATCHING_PENNIES = validate_game({"actions": [2, 2], "utilities": [[1, -1, -1, 1], [-1, 1, 1, -1]]})

shapes = st.lists(st.integers(2, 3), min_size=2, max_size=3).map(tuple)


def test_check_exact_potential(coord):
    res = check_exact_potential(coord.game, coord.potential)
    assert res == {"ok": True, "max_violation": 0.0}
    bad = np.array(coord.potential)
    bad[1, 0] += 0.1
    res = check_exact_potential(coord.game, bad)
    assert not res["ok"]
    assert res["max_violation"] == pytest.approx(0.1, abs=1e-15)
    zero = Game((2, 2), (as_tensor(np.zeros(4), (2, 2)),) * 2)
    assert check_exact_potential(zero, np.zeros(4))["ok"]
    with pytest.raises(DimensionMismatch):
        check_exact_potential(coord.game, np.zeros(3))


def test_extract_common_interest():
    w = np.array([[3.0, -1.0, 2.0], [0.5, 4.0, -2.0]])
    g = Game((2, 3), (as_tensor(w, (2, 3)),) * 2)
    pg = extract_potential(g)
    np.testing.assert_allclose(pg.potential, w - w[0, 0], atol=1e-14)


def test_extract_rejects_matching_pennies():
    with pytest.raises(NotPotentialGame) as exc:
        extract_potential(MATCHING_PENNIES)
    assert exc.value.max_violation > 0
    # the 4-cycle of alternating deviations sums to -8
    assert cycle_violation(MATCHING_PENNIES) == pytest.approx(8.0)


@given(shapes, st.integers(0, 2**31))
def test_extract_round_trip_with_dummy_terms(actions, seed):
    pg = sample_potential_game(actions, seed)
    assert check_exact_potential(pg.game, pg.potential)["max_violation"] <= 1e-12
    diff = extract_potential(pg.game).potential - pg.potential
    assert np.max(np.abs(diff - diff.mean())) <= 1e-10
    assert cycle_violation(pg.game) <= 1e-9


@pytest.mark.parametrize("counts,expected", [((2, 2), 9), ((2, 2, 2), 22), ((3, 3), 16)])
def test_param_dim(counts, expected):
    assert param_dim(counts) == expected


@given(shapes, st.data())
def test_param_dim_increasing(actions, data):
    i = data.draw(st.integers(0, len(actions) - 1))
    bigger = list(actions)
    bigger[i] += 1
    assert param_dim(bigger) > param_dim(actions)


def test_sampling_is_deterministic():
    a = sample_potential_game((2, 3), seed=5)
    b = sample_potential_game((2, 3), seed=5)
    assert a.potential.tobytes() == b.potential.tobytes()
    assert all(x.tobytes() == y.tobytes() for x, y in zip(a.game.utilities, b.game.utilities))
    c = sample_potential_game((2, 3), seed=6)
    assert a.potential.tobytes() != c.potential.tobytes()
