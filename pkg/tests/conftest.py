# tests/conftest.py
import random
from fractions import Fraction
from itertools import product
from typing import List, Tuple

import pytest

from coalmu.core.formula import And, Formula, Modal, Mu, Nu, Or, Var
from coalmu.core.parity import EXISTS, FORALL, ParityArena
from coalmu.core.semantics import CoalgebraModel, GameFrame
from coalmu.core.signature import (
    COALITION,
    GRADED,
    KRIPKE,
    MONOTONE,
    PROBABILISTIC,
    Modality,
    Signature,
)

PROPS = ("p", "q")

SIGNATURES = [
    Signature(KRIPKE),
    Signature(GRADED),
    Signature(PROBABILISTIC),
    Signature(MONOTONE),
    Signature(COALITION, 2),
]


def random_modality(sig: Signature, rng: random.Random) -> Modality:
    dual = rng.random() < 0.5
    if sig.kind == GRADED:
        return Modality(GRADED, dual, rng.randint(0, 1))
    if sig.kind == PROBABILISTIC:
        return Modality(PROBABILISTIC, dual, rng.choice([Fraction(0), Fraction(1, 2), Fraction(1)]))
    if sig.kind == COALITION:
        members = frozenset(a for a in sorted(sig.grand_coalition) if rng.random() < 0.5)
        return Modality(COALITION, dual, members)
    return Modality(sig.kind, dual)


def random_formula(sig: Signature, rng: random.Random, depth: int = 3, props=PROPS) -> Formula:
    """A random clean, guarded, closed-under-binders formula"""
    counter = [0]

    def gen(level: int, bound: List[Tuple[str, bool]]) -> Formula:
        usable = [name for name, guarded in bound if guarded]
        if level == 0 or rng.random() < 0.2:
            if usable and rng.random() < 0.5:
                return Var(rng.choice(usable))
            return Var(rng.choice(props), rng.random() < 0.5)
        choice = rng.choice(["and", "or", "modal", "modal", "fix"])
        if choice == "and":
            return And(gen(level - 1, bound), gen(level - 1, bound))
        if choice == "or":
            return Or(gen(level - 1, bound), gen(level - 1, bound))
        if choice == "modal":
            return Modal(random_modality(sig, rng), gen(level - 1, [(n, True) for n, _ in bound]))
        counter[0] += 1
        name = f"X{counter[0]}"
        binder = Mu if rng.random() < 0.5 else Nu
        return binder(name, gen(level - 1, bound + [(name, False)]))

    return gen(depth, [])


def random_model(kind: str, rng: random.Random, max_states: int = 3, agents: int = 2) -> CoalgebraModel:
    states = tuple(f"x{i}" for i in range(rng.randint(1, max_states)))
    valuation = {p: frozenset(x for x in states if rng.random() < 0.5) for p in PROPS}
    structure = {}
    for x in states:
        if kind == KRIPKE:
            structure[x] = frozenset(y for y in states if rng.random() < 0.5)
        elif kind == GRADED:
            structure[x] = {y: rng.randint(0, 2) for y in states}
        elif kind == PROBABILISTIC:
            weights = [rng.randint(0, 2) for _ in states]
            if not any(weights):
                weights[0] = 1
            total = sum(weights)
            structure[x] = {y: Fraction(w, total) for y, w in zip(states, weights) if w}
        elif kind == MONOTONE:
            candidates = [frozenset(y for y in states if rng.random() < 0.5) for _ in range(2)]
            structure[x] = frozenset(g for g in candidates if not any(o < g for o in candidates))
        else:
            sizes = tuple(rng.randint(1, 2) for _ in range(agents))
            outcome = {p: rng.choice(states) for p in product(*(range(s) for s in sizes))}
            structure[x] = GameFrame(sizes, outcome)
    return CoalgebraModel(
        kind=kind,
        states=states,
        valuation=valuation,
        structure=structure,
        agents=agents if kind == COALITION else None,
        root=states[0],
    )


def random_arena(rng: random.Random, size: int = 8, priorities: int = 4) -> ParityArena:
    arena = ParityArena()
    for _ in range(size):
        arena.add_position(rng.choice([EXISTS, FORALL]), rng.randrange(priorities))
    for v in range(size):
        for w in range(size):
            if rng.random() < 0.25:
                arena.add_move(v, w)
    return arena


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def kripke():
    return Signature(KRIPKE)


@pytest.fixture
def coalition3():
    return Signature(COALITION, 3)
