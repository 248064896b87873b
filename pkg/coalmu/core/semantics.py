# coalmu/core/semantics.py
"""Finite coalgebraic models, predicate liftings and model checking."""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple
import logging

from coalmu.core.config import get_settings
from coalmu.core.exceptions import CapExceeded, ModelFormatError, SignatureError
from coalmu.core.formula import (
    And,
    Formula,
    Modal,
    Mu,
    Nu,
    Or,
    Var,
    closure,
    is_fixpoint,
    parity_map,
    render,
    unfold,
)
from coalmu.core.parity import EXISTS, FORALL, ParityArena
from coalmu.core.signature import (
    COALITION,
    GRADED,
    KRIPKE,
    MONOTONE,
    PROBABILISTIC,
    Modality,
    Signature,
)

logger = logging.getLogger(__name__)
settings = get_settings()


@dataclass(frozen=True)
class GameFrame:
    """Strategy-set sizes per agent and the outcome of every profile"""

    sizes: Tuple[int, ...]
    outcome: Mapping[Tuple[int, ...], Any] = field(hash=False)

    def profiles(self) -> List[Tuple[int, ...]]:
        return list(product(*(range(s) for s in self.sizes)))


@dataclass
class CoalgebraModel:
    """A finite model (X, gamma, h); ``structure`` holds gamma(x) per state.

    kripke: frozenset of successors; graded: dict state -> multiplicity;
    probabilistic: dict state -> Fraction; monotone: frozenset of generator
    frozensets; coalition: GameFrame.
    """

    kind: str
    states: Tuple[str, ...]
    valuation: Dict[str, FrozenSet[str]]
    structure: Dict[str, Any]
    agents: Optional[int] = None
    root: Optional[str] = None

    def signature(self) -> Signature:
        return Signature(self.kind, self.agents)

    @property
    def carrier(self) -> FrozenSet[str]:
        return frozenset(self.states)


# Predicate liftings

def _coalition_forces(frame: GameFrame, coalition: FrozenSet[int], target: FrozenSet) -> bool:
    members = sorted(coalition)
    others = [i for i in range(1, len(frame.sizes) + 1) if i not in coalition]
    for chosen in product(*(range(frame.sizes[i - 1]) for i in members)):
        fixed = dict(zip(members, chosen))
        forced = True
        for rest in product(*(range(frame.sizes[i - 1]) for i in others)):
            profile_map = {**fixed, **dict(zip(others, rest))}
            profile = tuple(profile_map[i] for i in range(1, len(frame.sizes) + 1))
            if frame.outcome[profile] not in target:
                forced = False
                break
        if forced:
            return True
    return False


def _base_member(op: Modality, t: Any, target: FrozenSet) -> bool:
    if op.kind == KRIPKE:
        return t <= target
    if op.kind == GRADED:
        return sum(n for x, n in t.items() if x in target) > op.index
    if op.kind == PROBABILISTIC:
        return sum((Fraction(m) for x, m in t.items() if x in target), Fraction(0)) >= Fraction(op.index)
    if op.kind == MONOTONE:
        return any(generator <= target for generator in t)
    if op.kind == COALITION:
        return _coalition_forces(t, op.index, target)
    raise SignatureError(f"Unknown modality kind {op.kind!r}")


def lifting_member(op: Modality, t: Any, target: Iterable, carrier: Iterable) -> bool:
    """Is t in [[op]](target)? Barred operators go through the complement."""
    target = frozenset(target)
    if op.dual:
        return not _base_member(op, t, frozenset(carrier) - target)
    return _base_member(op, t, target)


# Direct evaluation

def evaluate(model: CoalgebraModel, a: Formula, env: Optional[Dict[str, FrozenSet[str]]] = None) -> FrozenSet[str]:
    """Truth set of a formula by Knaster-Tarski iteration"""
    env = env or {}
    carrier = model.carrier
    if isinstance(a, Var):
        if a.name in env:
            return env[a.name]
        if a.name not in model.valuation:
            raise ModelFormatError(f"Variable {a.name} is not covered by the valuation")
        value = model.valuation[a.name]
        return value if a.positive else carrier - value
    if isinstance(a, And):
        return evaluate(model, a.left, env) & evaluate(model, a.right, env)
    if isinstance(a, Or):
        return evaluate(model, a.left, env) | evaluate(model, a.right, env)
    if isinstance(a, Modal):
        inner = evaluate(model, a.arg, env)
        return frozenset(x for x in model.states if lifting_member(a.op, model.structure[x], inner, carrier))
    current = frozenset() if isinstance(a, Mu) else carrier
    while True:
        following = evaluate(model, a.body, {**env, a.var: current})
        if following == current:
            return current
        current = following


# the public name of the checker
eval_formula = evaluate


def truth_assignment(model: CoalgebraModel, gamma: Iterable[Formula]) -> Dict[Formula, FrozenSet[str]]:
    return {a: evaluate(model, a) for a in closure(gamma)}


# Model-checking game

def build_mc_game(model: CoalgebraModel, gamma: Iterable[Formula], start: Tuple[Formula, str],
                  max_states: Optional[int] = None) -> ParityArena:
    """Arena of the model-checking game, explored from start"""
    cap = max_states or settings.MAX_MODEL_STATES
    if len(model.states) > cap:
        raise CapExceeded(f"Model has {len(model.states)} states, the game is capped at {cap}")
    gamma = list(gamma)
    omega = parity_map(gamma)
    if start[0] not in omega.priorities:
        raise ValueError(f"{render(start[0])} is not in the closure of the root sequent")
    carrier = model.carrier
    # largest argument sets first
    subsets = [
        frozenset(s)
        for size in range(len(model.states), -1, -1)
        for s in combinations(model.states, size)
    ]

    arena = ParityArena()

    def position(key) -> Tuple[int, bool]:
        if key in arena.index:
            return arena.index[key], False
        if key[0] == "formula":
            _, a, x = key
            if isinstance(a, Var):
                if a.name not in model.valuation:
                    raise ModelFormatError(f"Variable {a.name} is not covered by the valuation")
                holds = x in model.valuation[a.name]
                if not a.positive:
                    holds = not holds
                owner = FORALL if holds else EXISTS
            elif isinstance(a, And):
                owner = FORALL
            else:
                owner = EXISTS
            return arena.add_position(owner, omega(a), key), True
        return arena.add_position(FORALL, 0, key), True

    first, _ = position(("formula", start[0], start[1]))
    arena.initial = first
    todo = [("formula", start[0], start[1])]
    while todo:
        key = todo.pop()
        source = arena.index[key]
        if key[0] == "formula":
            _, a, x = key
            if isinstance(a, Var):
                successors = []
            elif isinstance(a, (And, Or)):
                successors = [("formula", a.left, x), ("formula", a.right, x)]
            elif is_fixpoint(a):
                successors = [("formula", unfold(a), x)]
            else:
                successors = [
                    ("modal", a, u) for u in subsets
                    if lifting_member(a.op, model.structure[x], u, carrier)
                ]
        else:
            _, a, u = key
            successors = [("formula", a.arg, y) for y in sorted(u)]
        for target in successors:
            index, fresh = position(target)
            arena.add_move(source, index)
            if fresh:
                todo.append(target)
    logger.debug(f"Model-checking game has {len(arena)} positions")
    return arena


# Model invariants

def validate_model(model: CoalgebraModel) -> None:
    """Raise ModelFormatError unless the model satisfies its kind's invariants"""
    states = set(model.states)
    if len(states) != len(model.states) or not states:
        raise ModelFormatError("States must be a nonempty list without repetitions")
    signature = model.signature()
    if model.root is not None and model.root not in states:
        raise ModelFormatError(f"Root {model.root} is not a state")
    for name, value in model.valuation.items():
        if not value <= states:
            raise ModelFormatError(f"Valuation of {name} mentions unknown states")
    for x in model.states:
        if x not in model.structure:
            raise ModelFormatError(f"State {x} has no structure")
        t = model.structure[x]
        if signature.kind == KRIPKE:
            if not t <= states:
                raise ModelFormatError(f"Successors of {x} are not states")
        elif signature.kind == GRADED:
            if not set(t) <= states or any(not isinstance(n, int) or n < 0 for n in t.values()):
                raise ModelFormatError(f"Weights of {x} must map states to natural numbers")
        elif signature.kind == PROBABILISTIC:
            if not set(t) <= states or any(Fraction(m) < 0 for m in t.values()):
                raise ModelFormatError(f"Distribution of {x} must map states to nonnegative rationals")
            if sum((Fraction(m) for m in t.values()), Fraction(0)) != 1:
                raise ModelFormatError(f"Distribution of {x} does not sum to 1")
        elif signature.kind == MONOTONE:
            if any(not g <= states for g in t):
                raise ModelFormatError(f"Neighbourhoods of {x} mention unknown states")
            if any(a < b for a in t for b in t):
                raise ModelFormatError(f"Neighbourhood generators of {x} are not an antichain")
        elif signature.kind == COALITION:
            if len(t.sizes) != model.agents or any(s < 1 for s in t.sizes):
                raise ModelFormatError(f"State {x} needs a nonempty strategy set for each of {model.agents} agents")
            for profile in t.profiles():
                if t.outcome.get(profile) not in states:
                    raise ModelFormatError(f"Outcome of {x} is undefined or unknown at profile {profile}")
