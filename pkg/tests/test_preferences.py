import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from choiceprinciples.choice import ALL_TYPES, choose
from choiceprinciples.games import Game, enumerate_games, enumerate_payoffs
from choiceprinciples.preferences import PreferenceType, transform, transform_payoffs

PD = Game.from_flat(3, 0, 5, 1)
N3 = enumerate_payoffs(3)

games = st.lists(st.integers(0, 10), min_size=4, max_size=4).map(lambda v: Game.from_flat(*v))


def test_regret_example():
    assert transform(PD, PreferenceType.REGRET).u == ((-2, -1), (0, 0))


def test_altruistic_example():
    assert transform(PD, PreferenceType.ALTRUISTIC).u == ((6, 5), (5, 2))


def test_actual_is_identity():
    assert transform(PD, PreferenceType.ACTUAL).u == PD.payoff


@given(games)
def test_competitive_diagonal_is_zero(game):
    u = transform(game, PreferenceType.COMPETITIVE).u
    assert u[0][0] == 0 and u[1][1] == 0


def test_altruistic_symmetric_over_enumeration():
    u = transform_payoffs(N3, PreferenceType.ALTRUISTIC)
    np.testing.assert_array_equal(u, np.swapaxes(u, 1, 2))


def test_competitive_antisymmetric_over_enumeration():
    u = transform_payoffs(N3, PreferenceType.COMPETITIVE)
    np.testing.assert_array_equal(u, -np.swapaxes(u, 1, 2))


def test_regret_column_normalized_over_enumeration():
    u = transform_payoffs(N3, PreferenceType.REGRET)
    assert np.all(u <= 0)
    np.testing.assert_array_equal(u.max(axis=1), 0)


def test_vectorized_matches_scalar_transform():
    for pref in PreferenceType:
        batch = transform_payoffs(N3, pref)
        for k, game in enumerate(enumerate_games(3)):
            if k % 17:
                continue
            assert tuple(map(tuple, batch[k].tolist())) == transform(game, pref).u


def _column_maximizers(u):
    u = np.asarray(u)
    return [frozenset(np.flatnonzero(u[:, j] == u[:, j].max())) for j in range(2)]


@given(games, st.integers(-20, 20))
def test_uniform_shift_preserves_choice_structure(game, c):
    shifted = Game(tuple(tuple(v + c for v in row) for row in game.payoff))
    for pref in PreferenceType:
        before, after = transform(game, pref).as_array(), transform(shifted, pref).as_array()
        assert _column_maximizers(before) == _column_maximizers(after)
        if pref in (PreferenceType.COMPETITIVE, PreferenceType.REGRET):
            np.testing.assert_array_equal(before, after)
        else:
            scale = 1 if pref is PreferenceType.ACTUAL else 2
            np.testing.assert_array_equal(after - before, scale * c)
    for t in ALL_TYPES:
        assert choose(game, t) == choose(shifted, t)


def test_subjective_matrix_json():
    data = json.loads(transform(PD, PreferenceType.REGRET).to_json())
    assert data == {"pref": "Regret", "u": [[-2, -1], [0, 0]]}


@pytest.mark.parametrize("text", ["reg", "regret", "Regret"])
def test_parse_preference(text):
    assert PreferenceType.parse(text) is PreferenceType.REGRET


def test_canonical_order():
    assert [p.index for p in PreferenceType] == [0, 1, 2, 3]
    assert [p.value for p in PreferenceType] == ["pi", "alt", "com", "reg"]
