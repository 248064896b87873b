# coalmu/core/extraction.py
"""Coherent models read off a winning strategy of Exists in the tableau game."""
from collections import deque
from fractions import Fraction
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Tuple
import logging

from sympy import Rational, Symbol
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax

from coalmu.core.config import get_settings
from coalmu.core.exceptions import ExtractionError
from coalmu.core.formula import (
    And,
    Formula,
    Modal,
    Or,
    Sequent,
    Var,
    free_variables,
    is_atomic,
    render,
    render_sequent,
)
from coalmu.core.onestep import (
    Blueprint,
    ModalInstance,
    PrincipalAnd,
    PrincipalFix,
    PrincipalOr,
    undecided_constraints,
)
from coalmu.core.semantics import CoalgebraModel, GameFrame, evaluate, lifting_member
from coalmu.core.signature import COALITION, GRADED, KRIPKE, MONOTONE, PROBABILISTIC
from coalmu.core.tableau import ExistsPos, ForallPos, TableauGame

logger = logging.getLogger(__name__)
settings = get_settings()

AtomicPosition = Tuple[Sequent, int]


def is_atomic_sequent(delta: Sequent) -> bool:
    return all(is_atomic(a) for a in delta)


def propositional_strategy(delta: Sequent) -> Blueprint:
    """Forall's rule for the least non-atomic formula of delta"""
    candidates = sorted((a for a in delta if not is_atomic(a)), key=lambda a: a.key)
    if not candidates:
        raise ExtractionError("Sequent is atomic", str(render_sequent(delta)))
    least = candidates[0]
    if isinstance(least, And):
        return PrincipalAnd(least)
    if isinstance(least, Or):
        return PrincipalOr(least)
    return PrincipalFix(least)


class ModelExtractor:
    """Builds the coherent model induced by Exists' strategy f"""

    def __init__(self, game: TableauGame, strategy: Dict[int, int]):
        self.game = game
        self.arena = game.arena
        self.strategy = strategy
        self.sig = game.sig
        self.positions: List[AtomicPosition] = []
        self.children: Dict[AtomicPosition, List[Tuple[FrozenSet[Formula], Sequent, AtomicPosition]]] = {}
        self._sigma: Dict[Tuple[Sequent, int], AtomicPosition] = {}

    def _choose(self, exists_index: int) -> int:
        choice = self.strategy.get(exists_index)
        if choice is None:
            moves = self.arena.moves[exists_index]
            if len(moves) != 1:
                raise ExtractionError("Exists has no strategy", str(self.arena.keys[exists_index]))
            choice = moves[0]
        return choice

    def sigma_f(self, sequent: Sequent, state: int) -> AtomicPosition:
        """Atomic position reached by g and f without modal rules"""
        start = (sequent, state)
        if start in self._sigma:
            return self._sigma[start]
        steps = 0
        while not is_atomic_sequent(sequent):
            steps += 1
            if steps > settings.SIGMA_STEP_GUARD:
                raise ExtractionError("Propositional unfolding does not terminate", str(render_sequent(sequent)))
            blueprint = propositional_strategy(sequent)
            exists_index = self.arena.index.get(ExistsPos(sequent, blueprint, state))
            if exists_index is None:
                raise ExtractionError("Position not explored", str(render_sequent(sequent)))
            target = self.arena.keys[self._choose(exists_index)]
            sequent, state = target.sequent, target.state
        self._sigma[start] = (sequent, state)
        return sequent, state

    def explore(self) -> None:
        root = self.sigma_f(self.game.gamma, self.game.dta.initial)
        seen = {root}
        queue = deque([root])
        while queue:
            position = queue.popleft()
            self.positions.append(position)
            sequent, state = position
            forall_index = self.arena.index[ForallPos(sequent, state)]
            witnesses = []
            for exists_index in self.arena.moves[forall_index]:
                key = self.arena.keys[exists_index]
                if not isinstance(key.blueprint, ModalInstance):
                    continue
                target = self.arena.keys[self._choose(exists_index)]
                child = self.sigma_f(target.sequent, target.state)
                witnesses.append((frozenset(key.blueprint.premise()), target.sequent, child))
                if child not in seen:
                    seen.add(child)
                    queue.append(child)
            self.children[position] = witnesses

    def successors(self, position: AtomicPosition, a: Formula) -> FrozenSet[AtomicPosition]:
        """Suc_f(A, position)"""
        return frozenset(child for _, conclusion, child in self.children[position] if a in conclusion)


def _least(states, order: Dict) -> Optional:
    return min(states, key=order.get) if states else None


def _kripke_structure(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict):
    boxes = [a for a in atoms if not a.op.dual]
    diamonds = [a for a in atoms if a.op.dual]
    base = frozenset(ex.positions)
    for box in boxes:
        base &= ex.successors(y, box.arg)
    if not diamonds:
        return base if boxes else frozenset()
    chosen = set()
    for diamond in diamonds:
        witness = _least(ex.successors(y, diamond.arg) & base, order)
        if witness is None:
            raise ExtractionError(f"No witness for {render(diamond)}", _describe(y))
        chosen.add(witness)
    return frozenset(chosen)


def _monotone_structure(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict):
    generators = {ex.successors(y, a.arg) for a in atoms if not a.op.dual}
    return frozenset(g for g in generators if not any(other < g for other in generators))


def _coalition_structure(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict) -> GameFrame:
    agents = ex.sig.agents
    grand = ex.sig.grand_coalition
    positives = [a for a in atoms if not a.op.dual]
    duals = [a for a in atoms if a.op.dual]
    witnesses = {premise: child for premise, _, child in ex.children[y]}
    n, m = len(positives), len(duals)
    if m > 0:
        votes = list(range(n + 1))
    else:
        votes = list(range(1, n + 1)) or [0]
    shifts = list(range(max(m, 1)))
    options = list(product(votes, shifts))
    grand_duals = [a for a in duals if a.op.index == grand]

    def witness(premise) -> Optional[AtomicPosition]:
        return witnesses.get(frozenset(premise))

    outcome = {}
    for profile in product(range(len(options)), repeat=agents):
        choice = [options[c] for c in profile]
        coordinated = [
            a for k, a in enumerate(positives, start=1)
            if all(choice[i - 1][0] == k for i in a.op.index)
        ]
        target = None
        if m > 0:
            j = sum(shift for _, shift in choice) % m
            dual = duals[j]
            if all(a.op.index <= dual.op.index for a in coordinated):
                side = [a for a in grand_duals if a != dual]
                target = witness(coordinated + [dual] + side)
        if target is None and grand_duals:
            target = witness(coordinated + grand_duals)
        if target is None and coordinated:
            target = witness(coordinated)
        if target is None:
            if coordinated or grand_duals:
                raise ExtractionError("Missing coalition rule witness", _describe(y))
            target = y
        outcome[tuple(profile)] = target
    return GameFrame(tuple([len(options)] * agents), outcome)


def _types(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict):
    """Representative states for each realised membership pattern of the atom arguments"""
    extensions = [ex.successors(y, a.arg) for a in atoms]
    representatives = {}
    for state in sorted(ex.positions, key=order.get):
        pattern = tuple(state in ext for ext in extensions)
        representatives.setdefault(pattern, state)
    return list(representatives.items())


def _graded_structure(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict):
    if not atoms:
        return {}
    cap = sum(a.op.index for a in atoms) + 1
    types = _types(ex, y, atoms, order)
    counts = [0] * len(types)

    def satisfied() -> bool:
        for i, a in enumerate(atoms):
            inside = sum(c for (pattern, _), c in zip(types, counts) if pattern[i])
            outside = sum(c for (pattern, _), c in zip(types, counts) if not pattern[i])
            if a.op.dual and outside > a.op.index:
                return False
            if not a.op.dual and inside <= a.op.index:
                return False
        return True

    def boxes_broken() -> bool:
        for i, a in enumerate(atoms):
            if a.op.dual:
                outside = sum(c for (pattern, _), c in zip(types, counts) if not pattern[i])
                if outside > a.op.index:
                    return True
        return False

    def search(position: int) -> bool:
        if position == len(types):
            return satisfied()
        for value in range(cap + 1):
            counts[position] = value
            if boxes_broken():
                break
            if search(position + 1):
                return True
        counts[position] = 0
        return False

    if not search(0):
        raise ExtractionError("No multiplicity map satisfies the graded atoms", _describe(y))
    return {state: c for (_, state), c in zip(types, counts) if c > 0}


def _probabilistic_structure(ex: ModelExtractor, y: AtomicPosition, atoms: List[Modal], order: Dict):
    if not atoms:
        return {y: Fraction(1)}
    types = _types(ex, y, atoms, order)
    mass = [Symbol(f"m{i}") for i in range(len(types))]
    slack = Symbol("eps")
    constraints = [m >= 0 for m in mass] + [sum(mass) >= 1, sum(mass) <= 1, slack <= 1]
    for i, a in enumerate(atoms):
        index = Rational(Fraction(a.op.index).numerator, Fraction(a.op.index).denominator)
        if a.op.dual:
            outside = sum((w for (pattern, _), w in zip(types, mass) if not pattern[i]), Rational(0))
            constraints.append(outside + slack <= index)
        else:
            inside = sum((w for (pattern, _), w in zip(types, mass) if pattern[i]), Rational(0))
            constraints.append(inside >= index)
    kept = undecided_constraints(constraints)
    if kept is False:
        raise ExtractionError("Probabilistic constraints are contradictory", _describe(y))
    try:
        best, point = lpmax(slack, kept)
    except (InfeasibleLPError, UnboundedLPError):
        raise ExtractionError("No distribution satisfies the probabilistic atoms", _describe(y))
    if any(a.op.dual for a in atoms) and not best > 0:
        raise ExtractionError("No distribution satisfies the strict bounds", _describe(y))
    dist = {}
    for (_, state), m in zip(types, mass):
        value = point.get(m, Rational(0))
        weight = Fraction(str(value))
        if weight > 0:
            dist[state] = weight
    return dist


SOLVERS = {
    KRIPKE: _kripke_structure,
    MONOTONE: _monotone_structure,
    COALITION: _coalition_structure,
    GRADED: _graded_structure,
    PROBABILISTIC: _probabilistic_structure,
}


def _describe(position: AtomicPosition) -> str:
    sequent, state = position
    return f"{{{', '.join(render_sequent(sequent))}}} @ {state}"


def extract_model(game: TableauGame, strategy: Dict[int, int]) -> CoalgebraModel:
    """Coherent model whose root satisfies the root sequent, verified before return"""
    extractor = ModelExtractor(game, strategy)
    extractor.explore()
    names = {position: f"s{i}" for i, position in enumerate(extractor.positions)}
    order = {position: i for i, position in enumerate(extractor.positions)}
    solver = SOLVERS[game.sig.kind]

    structure = {}
    for y in extractor.positions:
        atoms = sorted((a for a in y[0] if isinstance(a, Modal)), key=lambda a: a.key)
        raw = solver(extractor, y, atoms, order)
        carrier = frozenset(extractor.positions)
        for a in atoms:
            if not lifting_member(a.op, raw, extractor.successors(y, a.arg), carrier):
                raise ExtractionError(f"Structure is not coherent for {render(a)}", _describe(y))
        structure[names[y]] = _rename(raw, names, game.sig.kind)

    props = set()
    for a in game.gamma:
        props |= free_variables(a)
    valuation = {
        p: frozenset(names[y] for y in extractor.positions if Var(p) in y[0])
        for p in sorted(props)
    }
    model = CoalgebraModel(
        kind=game.sig.kind,
        states=tuple(names[y] for y in extractor.positions),
        valuation=valuation,
        structure=structure,
        agents=game.sig.agents,
        root=names[extractor.positions[0]],
    )
    for a in game.gamma:
        if model.root not in evaluate(model, a):
            raise ExtractionError(f"Extracted model does not satisfy {render(a)}", model.root)
    logger.info(f"Extracted model with {len(model.states)} states")
    return model


def _rename(raw, names: Dict[AtomicPosition, str], kind: str):
    if kind == KRIPKE:
        return frozenset(names[y] for y in raw)
    if kind == MONOTONE:
        return frozenset(frozenset(names[y] for y in g) for g in raw)
    if kind == COALITION:
        return GameFrame(raw.sizes, {p: names[y] for p, y in raw.outcome.items()})
    return {names[y]: value for y, value in raw.items()}
