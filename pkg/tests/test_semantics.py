# tests/test_semantics.py
from fractions import Fraction

import pytest
from pydantic import ValidationError

from coalmu.core.exceptions import CapExceeded, ModelFormatError
from coalmu.core.formula import Var, closure, make_clean
from coalmu.core.parity import EXISTS, solve
from coalmu.core.parser import parse
from coalmu.core.semantics import (
    CoalgebraModel,
    GameFrame,
    build_mc_game,
    evaluate,
    lifting_member,
    truth_assignment,
    validate_model,
)
from coalmu.core.signature import COALITION, GRADED, KRIPKE, MONOTONE, PROBABILISTIC, Modality, Signature
from coalmu.schemas.model import ModelDocument

from conftest import SIGNATURES, random_formula, random_model

K = Signature(KRIPKE)


def loop_model(p_states=("x0",)) -> CoalgebraModel:
    return CoalgebraModel(
        kind=KRIPKE,
        states=("x0", "x1"),
        valuation={"p": frozenset(p_states), "q": frozenset()},
        structure={"x0": frozenset({"x0"}), "x1": frozenset()},
        root="x0",
    )


def test_evaluate_greatest_fixpoint_on_a_loop():
    model = loop_model()
    assert evaluate(model, parse("nu X. (p & dia X)", K)) == frozenset({"x0"})
    assert evaluate(model, parse("mu X. dia X", K)) == frozenset()
    assert evaluate(model, parse("box q", K)) == frozenset({"x1"})


def test_evaluate_literals_follow_the_valuation():
    model = loop_model()
    assert evaluate(model, Var("p")) == frozenset({"x0"})
    assert evaluate(model, Var("p", False)) == frozenset({"x1"})


def test_uncovered_variable_is_an_error():
    with pytest.raises(ModelFormatError):
        evaluate(loop_model(), Var("r"))


def test_truth_assignment_covers_the_closure():
    a = parse("nu X. (p & dia X)", K)
    assignment = truth_assignment(loop_model(), [a])
    assert assignment[a] == frozenset({"x0"})
    assert Var("p") in assignment


def test_lifting_members():
    carrier = ["a", "b"]
    half = Modality(PROBABILISTIC, False, Fraction(1, 2))
    assert lifting_member(half, {"a": Fraction(1, 2), "b": Fraction(1, 2)}, ["a"], carrier)
    # barred: mass of the complement stays below the index
    assert not lifting_member(Modality(PROBABILISTIC, True, Fraction(1, 2)), {"a": Fraction(1, 2), "b": Fraction(1, 2)}, ["a"], carrier)
    assert lifting_member(Modality(GRADED, False, 1), {"a": 2, "b": 0}, ["a"], carrier)
    assert not lifting_member(Modality(GRADED, False, 2), {"a": 2, "b": 0}, ["a"], carrier)
    frame = GameFrame((2, 1), {(0, 0): "a", (1, 0): "b"})
    assert lifting_member(Modality(COALITION, False, frozenset({1})), frame, ["a"], carrier)
    assert not lifting_member(Modality(COALITION, False, frozenset({2})), frame, ["a"], carrier)


@pytest.mark.slow
@pytest.mark.parametrize("sig", SIGNATURES, ids=lambda s: s.kind)
def test_model_checking_game_agrees_with_evaluation(sig, rng):
    instances = pairs = 0
    for _ in range(1000):
        if instances >= 100:
            break
        (a,) = make_clean([random_formula(sig, rng, depth=3)])
        if len(closure([a])) > 8:
            continue
        model = random_model(sig.kind, rng, max_states=3, agents=sig.agents or 2)
        truth = evaluate(model, a)
        for x in model.states:
            arena = build_mc_game(model, [a], (a, x))
            solution = solve(arena)
            assert (solution.winner(arena.initial) == EXISTS) == (x in truth)
            pairs += 1
        instances += 1
    assert instances >= 100
    assert pairs >= 100


def test_model_checking_game_cap():
    with pytest.raises(CapExceeded):
        a = parse("dia p", K)
        build_mc_game(loop_model(), [a], (a, "x0"), max_states=1)


@pytest.mark.parametrize("kind", [KRIPKE, GRADED, PROBABILISTIC, MONOTONE, COALITION])
def test_model_document_round_trip(kind, rng):
    for _ in range(10):
        model = random_model(kind, rng)
        document = ModelDocument.from_model(model)
        again = ModelDocument.model_validate_json(document.model_dump_json())
        assert again.to_model() == model


def test_model_document_needs_the_kind_fields():
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="kripke", states=["x"], weights={"x": {"x": 1}}).to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="linear", states=["x"]).to_model()
    with pytest.raises(ValidationError):
        ModelDocument(kind="kripke", states=["x"], colour="red")


def test_model_document_rejects_bad_structure():
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="probabilistic", states=["x"], dist={"x": {"x": "1/2"}}).to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="probabilistic", states=["x"], dist={"x": {"x": "one"}}).to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="monotone", states=["x", "y"], neighborhoods={"x": [["x"], ["x", "y"]], "y": []}).to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="kripke", states=["x"], transitions={"x": ["y"]}).to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(kind="kripke", states=["x"], transitions={"x": []}, root="z").to_model()
    with pytest.raises(ModelFormatError):
        ModelDocument(
            kind="coalition", states=["x"], agents=2, strategies={"x": [2, 1]}, outcome={"x": {"0,0": "x"}}
        ).to_model()


def test_validate_model_rejects_repeated_states():
    model = CoalgebraModel(
        kind=KRIPKE,
        states=("x", "x"),
        valuation={},
        structure={"x": frozenset()},
    )
    with pytest.raises(ModelFormatError):
        validate_model(model)
