# tests/test_extraction.py
import pytest

from coalmu.core.exceptions import ExtractionError
from coalmu.core.extraction import ModelExtractor, extract_model, is_atomic_sequent, propositional_strategy
from coalmu.core.formula import Var
from coalmu.core.onestep import PrincipalAnd, PrincipalFix, PrincipalOr
from coalmu.core.parser import parse, parse_sequent
from coalmu.core.semantics import evaluate, validate_model
from coalmu.core.signature import COALITION, GRADED, KRIPKE, MONOTONE, PROBABILISTIC, Signature
from coalmu.core.tableau import ForallPos, decide_sat

from conftest import random_formula

K = Signature(KRIPKE)


def satisfiable(text: str, sig: Signature):
    verdict = decide_sat(parse(text, sig), sig)
    assert verdict.satisfiable
    return verdict


def test_propositional_strategy_picks_a_principal_rule():
    assert propositional_strategy(parse_sequent(["p", "p & q"], K)) == PrincipalAnd(parse("p & q", K))
    assert propositional_strategy(parse_sequent(["dia p", "p | q"], K)) == PrincipalOr(parse("p | q", K))
    fix = parse("nu X. box X", K)
    assert propositional_strategy(frozenset({fix})) == PrincipalFix(fix)


def test_propositional_strategy_is_deterministic():
    delta = parse_sequent(["p & q", "q | p", "mu X. dia X"], K)
    assert propositional_strategy(delta) == propositional_strategy(frozenset(reversed(list(delta))))


def test_atomic_sequent_has_no_propositional_rule():
    delta = parse_sequent(["p", "dia q", "box ~p"], K)
    assert is_atomic_sequent(delta)
    with pytest.raises(ExtractionError):
        propositional_strategy(delta)


def test_single_variable_gives_a_single_state():
    verdict = satisfiable("p", K)
    model = extract_model(verdict.game, verdict.strategy)
    assert model.states == ("s0",)
    assert model.root == "s0"
    assert model.valuation["p"] == frozenset({"s0"})


def test_greatest_fixpoint_model_has_an_infinite_path():
    verdict = satisfiable("nu X. (p & dia X)", K)
    model = extract_model(verdict.game, verdict.strategy)
    a = parse("nu X. (p & dia X)", K)
    assert model.root in evaluate(model, a)
    assert all(model.structure[x] for x in model.states)
    validate_model(model)


def test_sigma_is_memoised_and_deterministic():
    verdict = satisfiable("(p | q) & nu X. (q & dia X)", K)
    first = ModelExtractor(verdict.game, verdict.strategy)
    second = ModelExtractor(verdict.game, verdict.strategy)
    start = (verdict.game.gamma, verdict.game.dta.initial)
    assert first.sigma_f(*start) == second.sigma_f(*start)
    assert start in first._sigma
    assert is_atomic_sequent(first.sigma_f(*start)[0])


@pytest.mark.slow
@pytest.mark.parametrize("kind", [KRIPKE, MONOTONE, COALITION])
def test_extracted_models_satisfy_random_formulas(kind, rng):
    sig = Signature(kind, 2 if kind == COALITION else None)
    extracted = 0
    for _ in range(1000):
        if extracted >= 100:
            break
        a = random_formula(sig, rng, depth=3)
        verdict = decide_sat(a, sig)
        if not verdict.satisfiable:
            continue
        model = extract_model(verdict.game, verdict.strategy)
        validate_model(model)
        assert all(model.root in evaluate(model, b) for b in verdict.game.gamma)
        forall_positions = sum(isinstance(key, ForallPos) for key in verdict.game.arena.keys)
        assert len(model.states) <= forall_positions
        extracted += 1
    assert extracted >= 100


def test_graded_needs_two_witnesses():
    g = Signature(GRADED)
    verdict = satisfiable("<1> p", g)
    model = extract_model(verdict.game, verdict.strategy)
    weights = model.structure[model.root]
    assert sum(n for y, n in weights.items() if y in model.valuation["p"]) >= 2


def test_probabilistic_split_mass():
    prob = Signature(PROBABILISTIC)
    verdict = satisfiable("<1/2> p & <1/2> ~p", prob)
    model = extract_model(verdict.game, verdict.strategy)
    validate_model(model)
    dist = model.structure[model.root]
    assert sum(m for y, m in dist.items() if y in model.valuation["p"]) == sum(
        m for y, m in dist.items() if y not in model.valuation["p"]
    )


def test_coalition_extraction(coalition3):
    verdict = satisfiable("[{1}] p & [{2}] q", coalition3)
    model = extract_model(verdict.game, verdict.strategy)
    assert model.agents == 3
    assert model.root in evaluate(model, parse("[{1}] p & [{2}] q", coalition3))
    assert Var("p").name in model.valuation
