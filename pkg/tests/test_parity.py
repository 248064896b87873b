# tests/test_parity.py
import pytest

from coalmu.core.exceptions import InvalidLasso
from coalmu.core.parity import (
    EXISTS,
    FORALL,
    ParityArena,
    brute_force_winners,
    compress_priorities,
    dump_arena,
    evaluate_play,
    solve,
    verify_strategy,
)

from conftest import random_arena


def two_cycle(priority_a: int, priority_b: int) -> ParityArena:
    arena = ParityArena()
    a = arena.add_position(EXISTS, priority_a, "a")
    b = arena.add_position(FORALL, priority_b, "b")
    arena.add_move(a, b)
    arena.add_move(b, a)
    return arena


def test_max_even_priority_wins_for_exists():
    assert solve(two_cycle(2, 1)).winners == [EXISTS, EXISTS]
    assert solve(two_cycle(2, 3)).winners == [FORALL, FORALL]


def test_dead_end_loses_for_owner():
    arena = ParityArena()
    stuck_exists = arena.add_position(EXISTS, 0)
    stuck_forall = arena.add_position(FORALL, 0)
    chooser = arena.add_position(EXISTS, 1)
    arena.add_move(chooser, stuck_exists)
    arena.add_move(chooser, stuck_forall)
    solution = solve(arena)
    assert solution.winner(stuck_exists) == FORALL
    assert solution.winner(stuck_forall) == EXISTS
    assert solution.winner(chooser) == EXISTS
    assert solution.strategy(EXISTS)[chooser] == stuck_forall


def test_least_index_tie_break():
    arena = ParityArena()
    start = arena.add_position(EXISTS, 0)
    left = arena.add_position(FORALL, 2)
    right = arena.add_position(FORALL, 2)
    arena.add_move(start, right)
    arena.add_move(start, left)
    arena.add_move(left, left)
    arena.add_move(right, right)
    assert solve(arena).strategy(EXISTS)[start] == left


def test_solver_agrees_with_brute_force(rng):
    for _ in range(500):
        arena = random_arena(rng, size=rng.randint(1, 8), priorities=4)
        assert solve(arena).winners == brute_force_winners(arena)


def test_extracted_strategies_win(rng):
    for _ in range(200):
        arena = random_arena(rng, size=rng.randint(1, 8), priorities=5)
        solution = solve(arena)
        for player in (EXISTS, FORALL):
            assert verify_strategy(arena, player, solution.strategy(player), solution.region(player))


def test_verify_strategy_rejects_losing_strategy():
    arena = two_cycle(2, 3)
    assert not verify_strategy(arena, EXISTS, {0: 1}, {0})


def test_compress_priorities_keeps_winners(rng):
    for _ in range(100):
        arena = random_arena(rng, size=6, priorities=9)
        compressed = compress_priorities(arena)
        assert max(compressed.priorities, default=0) <= len(set(arena.priorities))
        assert solve(compressed).winners == solve(arena).winners


def test_evaluate_play():
    arena = two_cycle(2, 1)
    assert evaluate_play(arena, [], [0, 1]) == EXISTS
    with pytest.raises(InvalidLasso):
        evaluate_play(arena, [], [0, 0])
    with pytest.raises(InvalidLasso):
        evaluate_play(arena, [0], [])


def test_dump_arena_lists_every_position():
    text = dump_arena(two_cycle(2, 1))
    lines = text.strip().splitlines()
    assert lines[0] == "parity 1;"
    assert lines[1].startswith("0 2 0 1")
    assert lines[-1] == "start 0;"
