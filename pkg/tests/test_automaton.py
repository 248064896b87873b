# tests/test_automaton.py
import pytest

from coalmu.core.automaton import (
    A_INITIAL,
    TraceTile,
    build_npw,
    determinize_complement,
    dump_automaton,
    lasso_bad_priorities,
    lasso_has_bad_trace,
    trace_relation,
)
from coalmu.core.exceptions import CeilingExceeded, InvalidLasso
from coalmu.core.formula import And, Modal, Mu, Nu, Or, Var, make_clean, parity_map, unfold
from coalmu.core.onestep import PrincipalAnd, PrincipalFix, RuleEngine
from coalmu.core.parser import parse
from coalmu.core.signature import KRIPKE, Signature
from coalmu.core.tableau import TableauGame

from conftest import SIGNATURES, random_formula, random_modality

K = Signature(KRIPKE)


def fix_loop(text: str):
    """The two-tile cycle unfold, then step through the diamond"""
    a = parse(text, K)
    engine = RuleEngine(K)
    start = frozenset({a})
    unfolding = TraceTile(start, PrincipalFix(a), 1)
    modal = TraceTile(unfolding.conclusion(), engine.modal_instances(unfolding.conclusion())[0], 1)
    assert modal.conclusion() == start
    return a, [unfolding, modal]


def test_trace_relation_for_fixpoint_and_conjunction():
    a = parse("mu X. dia X", K)
    tile = TraceTile(frozenset({a, Var("p")}), PrincipalFix(a), 1)
    assert trace_relation(tile) == {(a, unfold(a)), (Var("p"), Var("p"))}

    b = parse("p & q", K)
    tile = TraceTile(frozenset({b}), PrincipalAnd(b), 1)
    assert trace_relation(tile) == {(b, Var("p")), (b, Var("q"))}


def test_least_fixpoint_loop_has_a_bad_trace():
    a, cycle = fix_loop("mu X. dia X")
    omega = parity_map([a])
    assert lasso_bad_priorities([], cycle, omega) == {1}
    dta = determinize_complement(build_npw([a], omega))
    assert not dta.accepts_lasso([], cycle)


def test_greatest_fixpoint_loop_is_accepted():
    a, cycle = fix_loop("nu X. dia X")
    omega = parity_map([a])
    assert not lasso_has_bad_trace([], cycle, omega)
    dta = determinize_complement(build_npw([a], omega))
    assert dta.accepts_lasso([], cycle)


def test_npw_priorities_shift_by_one():
    a = parse("mu X. nu Y. (dia X | box Y)", K)
    omega = parity_map([a])
    npw = build_npw([a], omega)
    assert npw.priorities[A_INITIAL] == 0
    assert npw.priorities[a] == omega(a) + 1


def looping_formula(sig: Signature, rng):
    """A fixpoint whose body returns to its binder through two modalities"""
    step = And(Modal(random_modality(sig, rng), Var("L")), Modal(random_modality(sig, rng), Var("L")))
    combine = rng.choice([And, Or])
    binder = rng.choice([Mu, Nu])
    return binder("L", combine(random_formula(sig, rng, depth=2), step))


@pytest.mark.slow
@pytest.mark.parametrize("sig", SIGNATURES, ids=lambda s: s.kind)
def test_automaton_agrees_with_brute_force(sig, rng):
    checked = 0
    verdicts = set()
    for attempt in range(2000):
        if checked >= 1000:
            break
        a = looping_formula(sig, rng) if attempt % 2 else random_formula(sig, rng, depth=3)
        gamma = make_clean([a])
        game = TableauGame(frozenset(gamma), sig)
        omega = parity_map(gamma)
        dta = determinize_complement(build_npw(gamma, omega))
        for _ in range(10):
            lasso = game.sample_lasso(rng)
            if lasso is None:
                break
            stem, cycle = lasso
            accepted = dta.accepts_lasso(stem, cycle)
            assert accepted == (not lasso_has_bad_trace(stem, cycle, omega))
            verdicts.add(accepted)
            checked += 1
    assert checked >= 1000
    assert verdicts == {True, False}


def test_lasso_validation():
    a, cycle = fix_loop("mu X. dia X")
    omega = parity_map([a])
    with pytest.raises(InvalidLasso):
        lasso_bad_priorities([], [], omega)
    with pytest.raises(InvalidLasso):
        lasso_bad_priorities([], cycle[:1], omega)
    wrong_index = TraceTile(cycle[0].sequent, cycle[0].blueprint, 2)
    with pytest.raises(InvalidLasso):
        lasso_bad_priorities([], [wrong_index, cycle[1]], omega)
    dta = determinize_complement(build_npw([a], omega))
    with pytest.raises(InvalidLasso):
        dta.accepts_lasso(cycle, [])


def test_automaton_ceiling():
    a, cycle = fix_loop("mu X. dia X")
    dta = determinize_complement(build_npw([a], parity_map([a])), ceiling=1)
    with pytest.raises(CeilingExceeded):
        dta.accepts_lasso([], cycle)


def test_dump_automaton_lists_states():
    a, cycle = fix_loop("nu X. dia X")
    dta = determinize_complement(build_npw([a], parity_map([a])))
    dta.accepts_lasso([], cycle)
    text = dump_automaton(dta)
    assert text.startswith(f"# {len(dta)} states")
    assert "state 0 priority 0" in text
