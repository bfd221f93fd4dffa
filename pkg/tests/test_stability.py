import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from choiceprinciples.choice import SIMPLEX_TYPES
from choiceprinciples.stability import (
    NEUTRAL_SECOND,
    STRICT,
    can_invade,
    ess_set,
    is_ess,
    is_neutrally_stable,
    stability_reports,
)

int_matrices = arrays(np.int64, (4, 4), elements=st.integers(0, 6)).map(lambda a: a.astype(float))


def test_coordination_game_both_ess():
    m = [[2, 0], [0, 1]]
    assert is_ess(m, 0).is_ess and is_ess(m, 1).is_ess


def test_identical_twins_are_neutral_not_ess():
    m = np.array([[3, 3, 5], [3, 3, 5], [1, 1, 0]], dtype=float)
    for i in (0, 1):
        report = is_ess(m, i)
        assert not report.is_ess
        assert report.is_neutrally_stable
        assert report.violating_invaders == [(1 - i, NEUTRAL_SECOND)]


def test_identity_and_constant_matrices():
    assert ess_set(np.eye(3)) == [0, 1, 2]
    assert ess_set(np.full((3, 3), 2.0)) == []


def test_strict_violation_reported():
    report = is_ess([[1, 0], [2, 0]], 0)
    assert report.violating_invaders == [(1, STRICT)]
    assert not report.is_neutrally_stable


def test_second_condition_decides_ties():
    # tie against the incumbent; incumbent does better against the mutant
    assert is_ess([[1, 2], [1, 0]], 0).is_ess
    # tie, mutant does better against itself
    report = is_ess([[1, 0], [1, 2]], 0)
    assert not report.is_ess and not report.is_neutrally_stable


def test_eta_controls_tie_detection():
    m = [[1.0, 1.0], [1.0 + 1e-12, 0.0]]
    assert is_ess(m, 0).is_ess
    assert not is_ess(m, 0, eta=1e-15).is_ess


def test_index_out_of_range():
    with pytest.raises(IndexError):
        is_ess(np.eye(2), 2)


def test_non_square_rejected():
    with pytest.raises(ValueError):
        ess_set(np.zeros((2, 3)))


def test_radical_uncertainty_block(exact_full):
    block = exact_full.submatrix([t.label for t in SIMPLEX_TYPES])
    assert [block.labels[i] for i in ess_set(block)] == ["reg-simplex"]


def test_full_metagame_has_no_ess(exact_full):
    assert ess_set(exact_full) == []


def test_twins_resist_nothing_but_each_other(exact_full):
    reg_flat = exact_full.index("reg-flat")
    report = is_ess(exact_full, reg_flat)
    invaders = {exact_full.labels[j] for j, _ in report.violating_invaders}
    assert {"pi-flat", "reg-simplex"} <= invaders


@settings(max_examples=200)
@given(int_matrices, st.integers(0, 3), arrays(np.int64, 4, elements=st.integers(-5, 5)))
def test_column_shift_invariance(m, i, shift):
    shifted = m + shift[np.newaxis, :]
    assert is_ess(m, i).is_ess == is_ess(shifted, i).is_ess
    assert is_ess(m, i).is_neutrally_stable == is_ess(shifted, i).is_neutrally_stable


def test_ess_implies_neutral_on_random_matrices():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        m = rng.integers(0, 4, (4, 4)).astype(float)
        for report in stability_reports(m):
            if report.is_ess:
                assert report.is_neutrally_stable
            assert (not report.violating_invaders) == report.is_ess


@settings(max_examples=200)
@given(int_matrices, st.integers(0, 3), st.sets(st.integers(0, 3)))
def test_ess_survives_principal_submatrix(m, i, extra):
    keep = sorted(extra | {i})
    if is_ess(m, i).is_ess:
        sub = m[np.ix_(keep, keep)]
        assert is_ess(sub, keep.index(i)).is_ess


def test_report_json_condition_names():
    m = [[1, 0], [2, 0]]
    data = json.loads(is_ess(m, 0).to_json(labels=["a", "b"]))
    assert data == {
        "type": "a",
        "is_ess": False,
        "is_neutrally_stable": False,
        "violating_invaders": [{"invader": "b", "condition": "strict"}],
    }


def test_invasion_of_flat_twins_by_regret_minimizers(exact_full):
    residents = {exact_full.index("reg-flat"): 0.5, exact_full.index("pi-flat"): 0.5}
    assert can_invade(exact_full, residents, exact_full.index("reg-simplex"))
    # a competitive mutant is repelled
    assert not can_invade(exact_full, residents, exact_full.index("com-flat"))


def test_can_invade_basic():
    m = np.array([[2.0, 0.0], [0.0, 1.0]])
    assert not can_invade(m, [1.0, 0.0], 1)
    assert can_invade(np.array([[0.0, 0.0], [1.0, 1.0]]), [1.0, 0.0], 1)
    with pytest.raises(ValueError):
        can_invade(m, [0.7, 0.7], 1)


def test_is_neutrally_stable_helper():
    assert is_neutrally_stable(np.full((2, 2), 1.0), 0)
