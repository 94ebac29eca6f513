"""Brute-force reference oracles: queens, plan simulation, naive WFS."""

import pytest

from alp.oracles import (
    Violation,
    board_violation,
    queens_brute,
    queens_check,
    simulate_plan,
    wfs_brute,
)
from alp.wfs import FALSE, TRUE, UNDEF


def test_queens_counts():
    assert queens_brute(1)[0] == 1
    assert queens_brute(2)[0] == 0
    assert queens_brute(3)[0] == 0
    assert [queens_brute(n)[0] for n in range(4, 9)] == [2, 10, 4, 40, 92]


def test_queens_solutions_are_lexicographic_and_valid():
    count, sols = queens_brute(6)
    assert count == len(sols) == 4
    assert sols == sorted(sols)
    for cols in sols:
        assert queens_check(6, list(enumerate(cols, start=1)))


def test_queens_check_rejects_bad_boards():
    # two queens in one row
    assert not queens_check(4, [(1, 1), (1, 3), (2, 4), (3, 2), (4, 2)])
    # a missing row
    assert not queens_check(4, [(1, 2), (2, 4), (3, 1)])
    # shared column
    assert not queens_check(4, [(1, 2), (2, 2), (3, 1), (4, 3)])
    # shared diagonal
    assert not queens_check(4, [(1, 1), (2, 2), (3, 4), (4, 3)])


INITIAL = {1: 2, 2: "table", 3: 4, 4: "table", 5: 6, 6: "table"}
GOAL = {1: "table", 2: 1, 3: 2, 4: "table", 5: 4, 6: 5}
PLAN = [
    (1, "table", 0),
    (3, "table", 0),
    (2, 1, 1),
    (5, 4, 1),
    (3, 2, 2),
    (6, 5, 2),
]


def test_simulate_plan_reaches_goal():
    final = simulate_plan(INITIAL, PLAN, 3)
    assert final == GOAL


def test_simulate_empty_plan_is_identity():
    assert simulate_plan(INITIAL, [], 3) == INITIAL


def test_simulate_rejects_moving_a_covered_block():
    # block 2 carries block 1 at t=0
    result = simulate_plan(INITIAL, [(2, "table", 0)], 1)
    assert isinstance(result, Violation)
    assert result.time == 0 and result.rule == "clear"


def test_simulate_rejects_moving_target():
    # 1 moves onto 3 while 3 itself moves
    result = simulate_plan(INITIAL, [(1, 3, 0), (3, "table", 0)], 1)
    assert isinstance(result, Violation)
    assert result.rule == "moving-target"


def test_simulate_rejects_two_targets():
    result = simulate_plan(INITIAL, [(1, "table", 0), (1, 3, 0)], 1)
    assert isinstance(result, Violation)
    assert result.rule == "two-targets"


def test_simulate_rejects_three_moves_per_step():
    result = simulate_plan(
        {1: "table", 2: "table", 3: "table", 4: "table", 5: "table", 6: "table"},
        [(1, 2, 0), (3, 4, 0), (5, 6, 0)],
        1,
    )
    assert isinstance(result, Violation)
    assert result.rule == "gripper-capacity"


def test_simulate_rejects_stacking_two_on_one():
    result = simulate_plan(
        {1: "table", 2: "table", 3: "table"},
        [(1, 3, 0), (2, 3, 0)],
        1,
    )
    assert isinstance(result, Violation)
    assert result.rule == "two-on-block"


def test_board_violation_detects_double_stack_and_cycles():
    assert board_violation({1: "table", 2: 1, 3: 1}) is not None
    assert board_violation({1: 2, 2: 1}) is not None
    assert board_violation({1: "table", 2: 1, 3: 2}) is None


def test_wfs_brute_definite():
    # p. q :- p.
    assert wfs_brute([(0, (), ()), (1, (0,), ())], 3) == [TRUE, TRUE, FALSE]


def test_wfs_brute_even_loop():
    assert wfs_brute([(0, (), (1,)), (1, (), (0,))], 2) == [UNDEF, UNDEF]


def test_wfs_brute_odd_loop():
    assert wfs_brute([(0, (), (0,))], 1) == [UNDEF]


def test_wfs_brute_positive_loop_is_false():
    assert wfs_brute([(0, (1,), ()), (1, (0,), ())], 2) == [FALSE, FALSE]


def test_wfs_brute_caps_atom_count():
    with pytest.raises(ValueError):
        wfs_brute([], 13)
