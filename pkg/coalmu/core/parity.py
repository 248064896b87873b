# coalmu/core/parity.py
"""Finite parity games: arenas, a positional solver and brute-force checks.

Convention: an infinite play is won by Exists iff the largest priority seen
infinitely often is even; a finite play is lost by the player who cannot move.
"""
from collections import deque
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple
import logging

import networkx as nx

from coalmu.core.exceptions import InvalidLasso

logger = logging.getLogger(__name__)

EXISTS = 0
FORALL = 1

PLAYER_NAMES = {EXISTS: "Exists", FORALL: "Forall"}


class ParityArena:
    """Positions are integers 0..n-1, optionally tagged with a hashable key"""

    def __init__(self):
        self.owners: List[int] = []
        self.priorities: List[int] = []
        self.moves: List[List[int]] = []
        self.keys: List[Hashable] = []
        self.index: Dict[Hashable, int] = {}
        self.initial: int = 0

    def __len__(self) -> int:
        return len(self.owners)

    def add_position(self, owner: int, priority: int, key: Hashable = None) -> int:
        position = len(self.owners)
        self.owners.append(owner)
        self.priorities.append(priority)
        self.moves.append([])
        self.keys.append(key)
        if key is not None:
            self.index[key] = position
        return position

    def add_move(self, source: int, target: int) -> None:
        if not (0 <= source < len(self) and 0 <= target < len(self)):
            raise ValueError(f"Move {source} -> {target} leaves the arena")
        if target not in self.moves[source]:
            self.moves[source].append(target)

    def predecessors(self) -> List[List[int]]:
        preds: List[List[int]] = [[] for _ in self.owners]
        for source, targets in enumerate(self.moves):
            for target in targets:
                preds[target].append(source)
        return preds

    def max_priority(self) -> int:
        return max(self.priorities, default=0)


@dataclass
class Solution:
    winners: List[int]
    strategies: Dict[int, Dict[int, int]] = field(default_factory=dict)

    def winner(self, position: int) -> int:
        return self.winners[position]

    def region(self, player: int) -> Set[int]:
        return {v for v, w in enumerate(self.winners) if w == player}

    def strategy(self, player: int) -> Dict[int, int]:
        return self.strategies.get(player, {})


def _attractor(arena: ParityArena, preds: List[List[int]], target: Iterable[int], player: int,
               nodes: Set[int]) -> Tuple[Set[int], Dict[int, int]]:
    """Positions in nodes from which player can force a visit to target"""
    rank: Dict[int, int] = {}
    queue = deque()
    for v in sorted(target):
        if v in nodes and v not in rank:
            rank[v] = 0
            queue.append(v)
    remaining = {}
    for v in nodes:
        if arena.owners[v] != player:
            remaining[v] = sum(1 for w in arena.moves[v] if w in nodes)
    while queue:
        u = queue.popleft()
        for v in preds[u]:
            if v not in nodes or v in rank:
                continue
            if arena.owners[v] == player:
                rank[v] = rank[u] + 1
                queue.append(v)
            else:
                remaining[v] -= 1
                if remaining[v] == 0:
                    rank[v] = rank[u] + 1
                    queue.append(v)
    strategy = {}
    for v, r in rank.items():
        if r > 0 and arena.owners[v] == player:
            strategy[v] = min(w for w in arena.moves[v] if w in rank and rank[w] < r)
    return set(rank), strategy


def _zielonka(arena: ParityArena, preds: List[List[int]], nodes: Set[int]):
    regions = (set(), set())
    strategies = ({}, {})
    nodes = set(nodes)
    while nodes:
        top_priority = max(arena.priorities[v] for v in nodes)
        player = top_priority % 2
        opponent = 1 - player
        top = [v for v in nodes if arena.priorities[v] == top_priority]
        attracted, attr_strategy = _attractor(arena, preds, top, player, nodes)
        sub_regions, sub_strategies = _zielonka(arena, preds, nodes - attracted)
        if not sub_regions[opponent]:
            regions[player].update(nodes)
            strategies[player].update(sub_strategies[player])
            strategies[player].update(attr_strategy)
            for v in top:
                if arena.owners[v] == player:
                    strategies[player][v] = min(w for w in arena.moves[v] if w in nodes)
            break
        escaped, escape_strategy = _attractor(arena, preds, sub_regions[opponent], opponent, nodes)
        regions[opponent].update(escaped)
        strategies[opponent].update(sub_strategies[opponent])
        strategies[opponent].update(escape_strategy)
        nodes -= escaped
    return regions, strategies


def solve(arena: ParityArena) -> Solution:
    """Winning regions and positional winning strategies of both players"""
    preds = arena.predecessors()
    everything = set(range(len(arena)))
    stuck_exists = [v for v in everything if not arena.moves[v] and arena.owners[v] == EXISTS]
    lost, forall_strategy = _attractor(arena, preds, stuck_exists, FORALL, everything)
    rest = everything - lost
    stuck_forall = [v for v in rest if not arena.moves[v] and arena.owners[v] == FORALL]
    won, exists_strategy = _attractor(arena, preds, stuck_forall, EXISTS, rest)
    regions, strategies = _zielonka(arena, preds, rest - won)

    winners = [EXISTS] * len(arena)
    for v in lost | regions[FORALL]:
        winners[v] = FORALL
    solved = {
        EXISTS: {**strategies[EXISTS], **exists_strategy},
        FORALL: {**strategies[FORALL], **forall_strategy},
    }
    logger.debug(
        f"Solved arena with {len(arena)} positions: "
        f"{len(won) + len(regions[EXISTS])} won by Exists"
    )
    return Solution(winners, solved)


def evaluate_play(arena: ParityArena, stem: Sequence[int], cycle: Sequence[int]) -> int:
    """Winner of the infinite play stem . cycle^omega"""
    if not cycle:
        raise InvalidLasso("Lasso cycle must be nonempty")
    play = list(stem) + list(cycle) + [cycle[0]]
    for source, target in zip(play, play[1:]):
        if not (0 <= source < len(arena)) or target not in arena.moves[source]:
            raise InvalidLasso(f"{source} -> {target} is not a move")
    top = max(arena.priorities[v] for v in cycle)
    return EXISTS if top % 2 == 0 else FORALL


def play_from(arena: ParityArena, start: int, choices: Dict[int, int]) -> Tuple[List[int], List[int]]:
    """Follow positional choices from start; an empty cycle means the play got stuck"""
    seen: Dict[int, int] = {}
    path: List[int] = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        if v not in choices:
            return path, []
        v = choices[v]
    return path[:seen[v]], path[seen[v]:]


def _positional_choices(arena: ParityArena, player: int) -> Iterable[Dict[int, int]]:
    owned = [v for v in range(len(arena)) if arena.owners[v] == player and arena.moves[v]]
    for picks in product(*(arena.moves[v] for v in owned)):
        yield dict(zip(owned, picks))


def brute_force_winners(arena: ParityArena) -> List[int]:
    """Winners by trying every pair of positional strategies"""
    winners = []
    exists_choices = list(_positional_choices(arena, EXISTS))
    forall_choices = list(_positional_choices(arena, FORALL))
    for start in range(len(arena)):
        exists_wins = False
        for sigma in exists_choices:
            if all(_outcome(arena, start, {**sigma, **tau}) == EXISTS for tau in forall_choices):
                exists_wins = True
                break
        winners.append(EXISTS if exists_wins else FORALL)
    return winners


def _outcome(arena: ParityArena, start: int, choices: Dict[int, int]) -> int:
    stem, cycle = play_from(arena, start, choices)
    if not cycle:
        return 1 - arena.owners[stem[-1]]
    return evaluate_play(arena, stem, cycle)


def verify_strategy(arena: ParityArena, player: int, strategy: Dict[int, int], region: Iterable[int]) -> bool:
    """Does every play from region that follows strategy end in a win for player?"""
    graph = nx.DiGraph()
    todo = list(region)
    seen = set(todo)
    while todo:
        v = todo.pop()
        graph.add_node(v)
        if arena.owners[v] == player:
            if not arena.moves[v]:
                return False
            if v not in strategy or strategy[v] not in arena.moves[v]:
                return False
            successors = [strategy[v]]
        else:
            successors = arena.moves[v]
        for w in successors:
            graph.add_edge(v, w)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    losing = [d for d in set(arena.priorities[v] for v in graph) if d % 2 != player]
    for d in losing:
        low = graph.subgraph(v for v in graph if arena.priorities[v] <= d)
        for component in nx.strongly_connected_components(low):
            if not any(arena.priorities[v] == d for v in component):
                continue
            if len(component) > 1 or any(low.has_edge(v, v) for v in component):
                return False
    return True


def compress_priorities(arena: ParityArena) -> ParityArena:
    """Same game with priorities renumbered contiguously, parity and order kept"""
    mapping: Dict[int, int] = {}
    current: Optional[int] = None
    for p in sorted(set(arena.priorities)):
        if current is None:
            current = p % 2
        elif p % 2 != current % 2:
            current += 1
        mapping[p] = current
    compressed = ParityArena()
    compressed.owners = list(arena.owners)
    compressed.priorities = [mapping[p] for p in arena.priorities]
    compressed.moves = [list(m) for m in arena.moves]
    compressed.keys = list(arena.keys)
    compressed.index = dict(arena.index)
    compressed.initial = arena.initial
    return compressed


def dump_arena(arena: ParityArena) -> str:
    """Line-oriented dump in the PGSolver format"""
    lines = [f"parity {len(arena) - 1};"]
    for v in range(len(arena)):
        successors = ",".join(str(w) for w in arena.moves[v])
        label = str(arena.keys[v]).replace('"', "'") if arena.keys[v] is not None else ""
        line = f"{v} {arena.priorities[v]} {arena.owners[v]}"
        if successors:
            line += f" {successors}"
        if label:
            line += f' "{label}"'
        lines.append(line + ";")
    lines.append(f"start {arena.initial};")
    return "\n".join(lines) + "\n"
