# coalmu/core/tableau.py
"""The tableau game, satisfiability verdicts and closed-tableau certificates."""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple, Union
import logging
import random
import time

import networkx as nx

from coalmu.core.automaton import (
    DeterministicTraceAutomaton,
    TraceTile,
    build_npw,
    determinize_complement,
)
from coalmu.core.config import get_settings
from coalmu.core.exceptions import CeilingExceeded, CertificateError, StrategyError
from coalmu.core.formula import (
    Formula,
    ParityMap,
    Sequent,
    check_clean_guarded,
    closure,
    ensure_clean_guarded,
    make_clean,
    parity_map,
    render_sequent,
)
from coalmu.core.onestep import (
    Axiom,
    Blueprint,
    CoefficientBounds,
    ModalInstance,
    RuleEngine,
    blueprint_conclusions,
    describe_blueprint,
    instantiate,
    is_applicable,
)
from coalmu.core.parity import EXISTS, FORALL, ParityArena, Solution, compress_priorities, solve
from coalmu.core.signature import Signature

logger = logging.getLogger(__name__)
settings = get_settings()


@dataclass(frozen=True)
class ForallPos:
    sequent: Sequent
    state: int


@dataclass(frozen=True)
class ExistsPos:
    sequent: Sequent
    blueprint: Blueprint
    state: int


GamePosition = Union[ForallPos, ExistsPos]


class TableauGame:
    """Reachable part of the tableau game for a clean, guarded sequent"""

    def __init__(self, gamma: Sequent, sig: Signature, bounds: CoefficientBounds = CoefficientBounds(),
                 max_positions: Optional[int] = None, automaton_ceiling: Optional[int] = None):
        ensure_clean_guarded(gamma)
        self.gamma = frozenset(gamma)
        self.sig = sig
        self.bounds = bounds
        self.max_positions = max_positions or settings.MAX_POSITIONS
        self.omega: ParityMap = parity_map(self.gamma)
        self.engine = RuleEngine(sig, bounds)
        self.dta: DeterministicTraceAutomaton = determinize_complement(
            build_npw(self.gamma, self.omega), automaton_ceiling
        )
        self.arena = ParityArena()
        # conclusion index and target for each move out of an Exists position
        self.options: Dict[int, List[Tuple[int, int]]] = {}
        self._built = False
        self._live: Optional[Set[int]] = None

    def _position(self, key: GamePosition) -> Tuple[int, bool]:
        index = self.arena.index.get(key)
        if index is not None:
            return index, False
        if len(self.arena) >= self.max_positions:
            raise CeilingExceeded(f"Tableau game exceeded {self.max_positions} positions")
        if isinstance(key, ForallPos):
            index = self.arena.add_position(FORALL, self.dta.priority(key.state), key)
        else:
            index = self.arena.add_position(EXISTS, 0, key)
        return index, True

    def build_game(self) -> ParityArena:
        if self._built:
            return self.arena
        root = ForallPos(self.gamma, self.dta.initial)
        self.arena.initial, _ = self._position(root)
        todo = [root]
        while todo:
            key = todo.pop()
            source = self.arena.index[key]
            if isinstance(key, ForallPos):
                blueprints = self.engine.blueprints(key.sequent)
                axioms = [b for b in blueprints if isinstance(b, Axiom)]
                if axioms:
                    blueprints = axioms[:1]
                successors = [ExistsPos(key.sequent, b, key.state) for b in blueprints]
                for target in successors:
                    index, fresh = self._position(target)
                    self.arena.add_move(source, index)
                    if fresh:
                        todo.append(target)
            else:
                options = []
                conclusions = blueprint_conclusions(key.sequent, key.blueprint)
                for i, conclusion in enumerate(conclusions, start=1):
                    tile = TraceTile(key.sequent, key.blueprint, i)
                    target = ForallPos(conclusion, self.dta.step(key.state, tile))
                    index, fresh = self._position(target)
                    self.arena.add_move(source, index)
                    options.append((i, index))
                    if fresh:
                        todo.append(target)
                self.options[source] = options
        self._built = True
        logger.info(
            f"Tableau game has {len(self.arena)} positions, "
            f"trace automaton has {len(self.dta)} states"
        )
        return self.arena

    def live_positions(self) -> Set[int]:
        """Positions from which some play continues forever"""
        if self._live is None:
            graph = nx.DiGraph()
            graph.add_nodes_from(range(len(self.build_game())))
            graph.add_edges_from((v, w) for v, targets in enumerate(self.arena.moves) for w in targets)
            cyclic = set()
            for component in nx.strongly_connected_components(graph):
                if len(component) > 1 or any(graph.has_edge(v, v) for v in component):
                    cyclic |= component
            self._live = set(cyclic)
            for v in cyclic:
                self._live |= nx.ancestors(graph, v)
        return self._live

    def sample_lasso(self, rng: random.Random) -> Optional[Tuple[List[TraceTile], List[TraceTile]]]:
        """
        A random tile lasso along the arena, closed at the first repeated Forall
        position. None when every play from the root is finite.
        """
        live = self.live_positions()
        v = self.arena.initial
        if v not in live:
            return None
        tiles: List[TraceTile] = []
        seen: Dict[int, int] = {}
        while v not in seen:
            seen[v] = len(tiles)
            e = rng.choice([w for w in self.arena.moves[v] if w in live])
            i, v = rng.choice([(i, w) for i, w in self.options[e] if w in live])
            key = self.arena.keys[e]
            tiles.append(TraceTile(key.sequent, key.blueprint, i))
        return tiles[:seen[v]], tiles[seen[v]:]


def build_game(gamma: Sequent, sig: Signature, bounds: CoefficientBounds = CoefficientBounds(),
               max_positions: Optional[int] = None) -> TableauGame:
    game = TableauGame(gamma, sig, bounds, max_positions)
    game.build_game()
    return game


# Tableaux

@dataclass
class TableauNode:
    id: int
    label: Sequent
    annotation: Optional[Blueprint] = None


@dataclass
class Tableau:
    nodes: List[TableauNode]
    edges: List[Tuple[int, int, int]]
    root: int

    def node(self, node_id: int) -> TableauNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)

    def graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        for n in self.nodes:
            graph.add_node(n.id)
        for source, target, index in self.edges:
            graph.add_edge(source, target, index=index)
        return graph


@dataclass
class SatVerdict:
    satisfiable: bool
    game: TableauGame
    solution: Solution
    strategy: Dict[int, int]
    tableau: Optional[Tableau] = None
    stats: Dict[str, float] = field(default_factory=dict)


def extract_tableau(game: TableauGame, strategy: Dict[int, int], solution: Optional[Solution] = None) -> Tableau:
    """Closed tableau read off a Forall strategy winning at the root"""
    arena = game.arena
    if solution is not None and solution.winner(arena.initial) != FORALL:
        raise StrategyError("Forall does not win the tableau game at the root")
    ids: Dict[int, int] = {arena.initial: 0}
    order = [arena.initial]
    nodes: List[TableauNode] = []
    edges: List[Tuple[int, int, int]] = []
    cursor = 0
    while cursor < len(order):
        position = order[cursor]
        cursor += 1
        key = arena.keys[position]
        choice = strategy.get(position)
        if choice is None:
            raise StrategyError(f"Strategy undefined at {render_sequent(key.sequent)}")
        chosen = arena.keys[choice]
        nodes.append(TableauNode(ids[position], key.sequent, chosen.blueprint))
        for index, target in game.options[choice]:
            if target not in ids:
                ids[target] = len(order)
                order.append(target)
            edges.append((ids[position], ids[target], index))
    logger.debug(f"Extracted tableau with {len(nodes)} nodes")
    return Tableau(nodes, edges, 0)


def decide_sat(gamma: Union[Formula, Iterable[Formula]], sig: Signature,
               bounds: CoefficientBounds = CoefficientBounds(),
               max_positions: Optional[int] = None) -> SatVerdict:
    """Decide satisfiability of a formula (or sequent) via the tableau game"""
    if isinstance(gamma, Formula):
        gamma = [gamma]
    gamma = make_clean(gamma)
    started = time.perf_counter()
    game = TableauGame(gamma, sig, bounds, max_positions)
    arena = game.build_game()
    built = time.perf_counter()
    solution = solve(compress_priorities(arena))
    solved = time.perf_counter()
    stats = {
        "positions": len(arena),
        "automaton_states": len(game.dta),
        "build_seconds": round(built - started, 4),
        "solve_seconds": round(solved - built, 4),
    }
    if solution.winner(arena.initial) == EXISTS:
        return SatVerdict(True, game, solution, solution.strategy(EXISTS), stats=stats)
    strategy = solution.strategy(FORALL)
    tableau = extract_tableau(game, strategy, solution)
    stats["tableau_nodes"] = len(tableau.nodes)
    return SatVerdict(False, game, solution, strategy, tableau, stats)


# Verification

@dataclass
class CheckResult:
    ok: bool
    reason: str = ""
    witness: List[int] = field(default_factory=list)

    def diagnostic(self) -> str:
        if self.ok:
            return "closed"
        if self.witness:
            return f"{self.reason} (nodes {', '.join(str(w) for w in self.witness)})"
        return self.reason


def _rebuilt(sig: Signature, blueprint: Blueprint) -> Blueprint:
    if not isinstance(blueprint, ModalInstance):
        return blueprint
    rule = instantiate(sig, blueprint.rule.tag, blueprint.premise(), blueprint.rule.code)
    return ModalInstance(rule, blueprint.args)


def verify_closed(tableau: Tableau, gamma: Iterable[Formula], sig: Signature,
                  bounds: CoefficientBounds = CoefficientBounds(),
                  omega: Optional[ParityMap] = None) -> CheckResult:
    """Check that a tableau is a closed tableau for gamma, trusting nothing"""
    gamma = frozenset(gamma)
    nodes: Dict[int, TableauNode] = {}
    for n in tableau.nodes:
        if n.id in nodes:
            return CheckResult(False, "duplicate node id", [n.id])
        nodes[n.id] = n
    if tableau.root not in nodes:
        return CheckResult(False, "root is not a node")
    if nodes[tableau.root].label != gamma:
        return CheckResult(False, "root label does not match the sequent", [tableau.root])
    problem = check_clean_guarded(gamma)
    if problem:
        return CheckResult(False, problem)
    cl = closure(gamma)
    engine = RuleEngine(sig, bounds)

    outgoing: Dict[int, Dict[int, int]] = {node_id: {} for node_id in nodes}
    for source, target, index in tableau.edges:
        if source not in nodes or target not in nodes:
            return CheckResult(False, "edge refers to an unknown node", [source, target])
        if index in outgoing[source]:
            return CheckResult(False, f"two edges for conclusion {index}", [source])
        outgoing[source][index] = target

    annotations: Dict[int, Blueprint] = {}
    for node_id, n in nodes.items():
        if not n.label <= cl:
            return CheckResult(False, "label outside the closure", [node_id])
        if n.annotation is None:
            if engine.blueprints(n.label):
                return CheckResult(False, "annotation undefined although a rule applies", [node_id])
            return CheckResult(False, "open leaf: no rule applies", [node_id])
        try:
            blueprint = _rebuilt(sig, n.annotation)
        except CertificateError as exc:
            return CheckResult(False, f"invalid rule instance: {exc}", [node_id])
        if not is_applicable(n.label, blueprint):
            return CheckResult(False, f"rule {describe_blueprint(blueprint)} does not apply", [node_id])
        conclusions = blueprint_conclusions(n.label, blueprint)
        if set(outgoing[node_id]) != set(range(1, len(conclusions) + 1)):
            return CheckResult(False, "successors do not match the rule conclusions", [node_id])
        for index, target in outgoing[node_id].items():
            if nodes[target].label != conclusions[index - 1]:
                return CheckResult(False, f"conclusion {index} has the wrong label", [node_id, target])
        annotations[node_id] = blueprint

    omega = omega or parity_map(gamma)
    dta = determinize_complement(build_npw(gamma, omega))
    product = nx.DiGraph()
    start = (tableau.root, dta.initial)
    product.add_node(start)
    todo = [start]
    while todo:
        node_id, state = todo.pop()
        for index, target in outgoing[node_id].items():
            tile = TraceTile(nodes[node_id].label, annotations[node_id], index)
            following = (target, dta.step(state, tile))
            if following not in product:
                product.add_node(following)
                todo.append(following)
            product.add_edge((node_id, state), following)

    priorities = {v: dta.priority(v[1]) for v in product}
    for d in sorted({p for p in priorities.values() if p % 2 == 0}):
        low = product.subgraph(v for v in product if priorities[v] <= d)
        for component in nx.strongly_connected_components(low):
            if not any(priorities[v] == d for v in component):
                continue
            if len(component) > 1 or any(low.has_edge(v, v) for v in component):
                witness = sorted({v[0] for v in component})
                return CheckResult(False, "infinite path without a bad trace", witness)
    logger.info(f"Verified closed tableau with {len(nodes)} nodes, product size {len(product)}")
    return CheckResult(True)
