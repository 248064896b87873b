# coalmu/core/automaton.py
"""Trace tiles and the automata recognising tile words without bad traces.

The pipeline is: nondeterministic parity automaton guessing a bad trace,
an equivalent Buchi automaton, Safra trees in the parity-producing style,
and finally complementation by shifting priorities.
"""
from dataclasses import dataclass
from typing import Dict, FrozenSet, Hashable, Iterable, List, Optional, Sequence, Set, Tuple, Union
import logging

import networkx as nx

from coalmu.core.config import get_settings
from coalmu.core.exceptions import CeilingExceeded, InvalidLasso
from coalmu.core.formula import (
    And,
    Formula,
    Modal,
    Or,
    ParityMap,
    Sequent,
    closure,
    render_sequent,
    unfold,
)
from coalmu.core.onestep import (
    Axiom,
    Blueprint,
    ModalInstance,
    PrincipalAnd,
    PrincipalFix,
    PrincipalOr,
    blueprint_conclusions,
    describe_blueprint,
    is_applicable,
)

logger = logging.getLogger(__name__)
settings = get_settings()

A_INITIAL = "a_I"

NpwState = Union[Formula, str]


@dataclass(frozen=True)
class TraceTile:
    sequent: Sequent
    blueprint: Blueprint
    index: int

    def conclusion(self) -> Sequent:
        return blueprint_conclusions(self.sequent, self.blueprint)[self.index - 1]

    def describe(self) -> str:
        return f"{render_sequent(self.sequent)} / {describe_blueprint(self.blueprint)} / {self.index}"


def check_tile(tile: TraceTile) -> None:
    if not is_applicable(tile.sequent, tile.blueprint):
        raise InvalidLasso(f"Blueprint {describe_blueprint(tile.blueprint)} does not apply")
    count = len(blueprint_conclusions(tile.sequent, tile.blueprint))
    if not 1 <= tile.index <= count:
        raise InvalidLasso(f"Conclusion index {tile.index} out of range 1..{count}")


def trace_relation(tile: TraceTile) -> FrozenSet[Tuple[Formula, Formula]]:
    """Pairs (A, B) with B in the conclusion continuing a trace through A"""
    blueprint = tile.blueprint
    if isinstance(blueprint, ModalInstance):
        chosen = blueprint.rule.conclusions[tile.index - 1]
        premise = blueprint.premise()
        return frozenset((premise[j], blueprint.args[j]) for j in chosen)
    if isinstance(blueprint, Axiom):
        return frozenset()
    principal = blueprint.formula
    if isinstance(blueprint, PrincipalAnd):
        targets = [principal.left, principal.right]
    elif isinstance(blueprint, PrincipalOr):
        targets = [principal.left if tile.index == 1 else principal.right]
    else:
        targets = [unfold(principal)]
    pairs = {(principal, b) for b in targets}
    pairs.update((a, a) for a in tile.sequent if a != principal)
    return frozenset(pairs)


# Nondeterministic automaton for bad traces

@dataclass
class NondetTraceAutomaton:
    """Accepts (max-even) the tile words that carry a bad trace"""

    root: Sequent
    states: FrozenSet[NpwState]
    priorities: Dict[NpwState, int]

    def successors(self, state: NpwState, tile: TraceTile) -> FrozenSet[Formula]:
        relation = trace_relation(tile)
        if state == A_INITIAL:
            return frozenset(b for a, b in relation if a in self.root)
        return frozenset(b for a, b in relation if a == state)


def build_npw(gamma: Iterable[Formula], omega: ParityMap) -> NondetTraceAutomaton:
    root = frozenset(gamma)
    cl = closure(root)
    priorities: Dict[NpwState, int] = {a: omega(a) + 1 for a in cl}
    priorities[A_INITIAL] = 0
    return NondetTraceAutomaton(root, frozenset(cl) | {A_INITIAL}, priorities)


# Safra trees: (name, label, children) with labels frozensets of Buchi states

SafraTree = Optional[Tuple[int, FrozenSet[int], tuple]]


class _Node:
    __slots__ = ("name", "label", "children", "old")

    def __init__(self, name: int, label: Set[int], old: bool = True):
        self.name = name
        self.label = set(label)
        self.children: List["_Node"] = []
        self.old = old


def _thaw(tree) -> _Node:
    name, label, children = tree
    node = _Node(name, label)
    node.children = [_thaw(c) for c in children]
    return node


def _preorder(node: _Node) -> List[_Node]:
    result = [node]
    for child in node.children:
        result.extend(_preorder(child))
    return result


def _freeze(node: _Node, names: Dict[int, int]):
    return (names[node.name], frozenset(node.label), tuple(_freeze(c, names) for c in node.children))


def _render_tree(tree) -> str:
    if tree is None:
        return "()"
    name, label, children = tree
    inner = " ".join(_render_tree(c) for c in children)
    return f"({name}:{sorted(label)}{' ' + inner if inner else ''})"


class DeterministicTraceAutomaton:
    """Deterministic parity automaton accepting tile words with no bad trace.

    States are interned integers built lazily; ``priority`` is max-parity with
    even meaning that no bad trace occurs.
    """

    def __init__(self, npw: NondetTraceAutomaton, ceiling: Optional[int] = None):
        self.npw = npw
        self.ceiling = ceiling or settings.AUTOMATON_STATE_CEILING
        self.evens = sorted({p for q, p in npw.priorities.items() if q != A_INITIAL and p % 2 == 0})
        self.nba_bound = len(npw.states) * (1 + len(self.evens))
        self.top = 2 * self.nba_bound + 1
        self._nba_states: List[Tuple[NpwState, Optional[int]]] = []
        self._nba_index: Dict[Tuple[NpwState, Optional[int]], int] = {}
        self._nba_delta: Dict[Tuple[int, TraceTile], FrozenSet[int]] = {}
        self._states: List[Tuple[SafraTree, Optional[int]]] = []
        self._state_index: Dict[Tuple[SafraTree, Optional[int]], int] = {}
        self._delta: Dict[Tuple[int, TraceTile], int] = {}
        start = self._nba(A_INITIAL, None)
        self.initial = self._intern((1, frozenset({start}), ()), None)

    def __len__(self) -> int:
        return len(self._states)

    # Buchi layer

    def _nba(self, q: NpwState, k: Optional[int]) -> int:
        key = (q, k)
        if key not in self._nba_index:
            self._nba_index[key] = len(self._nba_states)
            self._nba_states.append(key)
        return self._nba_index[key]

    def _accepting(self, s: int) -> bool:
        q, k = self._nba_states[s]
        return k is not None and self.npw.priorities[q] == k

    def _nba_step(self, s: int, tile: TraceTile) -> FrozenSet[int]:
        key = (s, tile)
        cached = self._nba_delta.get(key)
        if cached is not None:
            return cached
        q, k = self._nba_states[s]
        targets = set()
        for q2 in self.npw.successors(q, tile):
            p = self.npw.priorities[q2]
            if k is None:
                targets.add(self._nba(q2, None))
                for even in self.evens:
                    if p <= even:
                        targets.add(self._nba(q2, even))
            elif p <= k:
                targets.add(self._nba(q2, k))
        result = frozenset(targets)
        self._nba_delta[key] = result
        return result

    # Parity layer

    def _intern(self, tree: SafraTree, emitted: Optional[int]) -> int:
        key = (tree, emitted)
        index = self._state_index.get(key)
        if index is None:
            if len(self._states) >= self.ceiling:
                raise CeilingExceeded(f"Trace automaton exceeded {self.ceiling} states")
            index = len(self._states)
            self._states.append(key)
            self._state_index[key] = index
        return index

    def priority(self, state: int) -> int:
        emitted = self._states[state][1]
        return 0 if emitted is None else self.top - emitted

    def _safra_step(self, tree: SafraTree, tile: TraceTile) -> Tuple[SafraTree, int]:
        neutral = self.top
        if tree is None:
            return None, neutral
        root = _thaw(tree)
        old_nodes = _preorder(root)
        next_name = max(n.name for n in old_nodes) + 1

        for node in old_nodes:
            label = set()
            for s in node.label:
                label |= self._nba_step(s, tile)
            node.label = label

        for node in old_nodes:
            accepting = {s for s in node.label if self._accepting(s)}
            if accepting:
                node.children.append(_Node(next_name, accepting, old=False))
                next_name += 1

        def merge(node: _Node, allowed: Set[int]) -> None:
            node.label &= allowed
            used: Set[int] = set()
            for child in node.children:
                merge(child, node.label - used)
                used |= child.label

        merge(root, set(root.label))

        removed: List[int] = []

        def discard(node: _Node) -> None:
            for n in _preorder(node):
                if n.old:
                    removed.append(n.name)

        def prune(node: _Node) -> None:
            kept = []
            for child in node.children:
                if child.label:
                    prune(child)
                    kept.append(child)
                else:
                    discard(child)
            node.children = kept

        if not root.label:
            discard(root)
            return None, 2 * min(removed) - 1
        prune(root)

        flashed: List[int] = []
        stack = [root]
        while stack:
            node = stack.pop()
            if node.children and set().union(*(c.label for c in node.children)) == node.label:
                for child in node.children:
                    discard(child)
                node.children = []
                flashed.append(node.name)
            else:
                stack.extend(node.children)

        e = min(removed) if removed else None
        f = min(flashed) if flashed else None
        if f is not None and (e is None or f < e):
            emitted = 2 * f
        elif e is not None:
            emitted = 2 * e - 1
        else:
            emitted = neutral
        survivors = sorted(n.name for n in _preorder(root))
        names = {old: new for new, old in enumerate(survivors, start=1)}
        return _freeze(root, names), emitted

    def step(self, state: int, tile: TraceTile) -> int:
        key = (state, tile)
        cached = self._delta.get(key)
        if cached is not None:
            return cached
        tree, _ = self._states[state]
        following, emitted = self._safra_step(tree, tile)
        target = self._intern(following, emitted)
        self._delta[key] = target
        return target

    def run(self, tiles: Iterable[TraceTile], state: Optional[int] = None) -> int:
        state = self.initial if state is None else state
        for tile in tiles:
            state = self.step(state, tile)
        return state

    def accepts_lasso(self, stem: Sequence[TraceTile], cycle: Sequence[TraceTile]) -> bool:
        """Acceptance of stem . cycle^omega"""
        if not cycle:
            raise InvalidLasso("Lasso cycle must be nonempty")
        state = self.run(stem)
        entries: Dict[int, int] = {}
        seen: List[int] = []
        while state not in entries:
            entries[state] = len(seen)
            priorities = []
            for tile in cycle:
                state = self.step(state, tile)
                priorities.append(self.priority(state))
            seen.append(max(priorities))
        return max(seen[entries[state]:]) % 2 == 0

    def describe_state(self, state: int) -> str:
        tree, emitted = self._states[state]
        return f"{_render_tree(tree)} emitted={emitted}"

    def dump(self) -> str:
        lines = [
            f"# {len(self._states)} states, {len(self._delta)} transitions, "
            f"{len(self._nba_states)} buchi states"
        ]
        for index in range(len(self._states)):
            lines.append(f"state {index} priority {self.priority(index)} {self.describe_state(index)}")
        for (source, tile), target in self._delta.items():
            lines.append(f"{source} -> {target} on {tile.describe()}")
        return "\n".join(lines) + "\n"


def determinize_complement(npw: NondetTraceAutomaton, ceiling: Optional[int] = None) -> DeterministicTraceAutomaton:
    return DeterministicTraceAutomaton(npw, ceiling)


def dump_automaton(dta: DeterministicTraceAutomaton) -> str:
    return dta.dump()


# Brute-force lasso oracle

def _check_chain(tiles: Sequence[TraceTile], stem_length: int) -> None:
    for tile in tiles:
        check_tile(tile)
    for i, tile in enumerate(tiles):
        following = tiles[i + 1] if i + 1 < len(tiles) else tiles[stem_length]
        if tile.conclusion() != following.sequent:
            raise InvalidLasso(f"Tile {i} does not lead to the sequent of the next tile")


def lasso_bad_priorities(stem: Sequence[TraceTile], cycle: Sequence[TraceTile], omega: ParityMap) -> Set[int]:
    """Odd priorities that occur as the top priority of some bad trace"""
    if not cycle:
        raise InvalidLasso("Lasso cycle must be nonempty")
    tiles = list(stem) + list(cycle)
    _check_chain(tiles, len(stem))
    graph = nx.DiGraph()
    for i, tile in enumerate(tiles):
        following = i + 1 if i + 1 < len(tiles) else len(stem)
        for a in tile.sequent:
            graph.add_node((a, i))
        for a, b in trace_relation(tile):
            graph.add_edge((a, i), (b, following))
    reachable: Set[Hashable] = set()
    for a in tiles[0].sequent:
        reachable.add((a, 0))
        reachable |= nx.descendants(graph, (a, 0))
    graph = graph.subgraph(reachable)
    found = set()
    for d in sorted({omega(a) for a, _ in graph if omega(a) % 2 == 1}):
        low = graph.subgraph(n for n in graph if omega(n[0]) <= d)
        for component in nx.strongly_connected_components(low):
            if not any(omega(n[0]) == d for n in component):
                continue
            if len(component) > 1 or any(low.has_edge(n, n) for n in component):
                found.add(d)
                break
    return found


def lasso_has_bad_trace(stem: Sequence[TraceTile], cycle: Sequence[TraceTile], omega: ParityMap) -> bool:
    return bool(lasso_bad_priorities(stem, cycle, omega))

