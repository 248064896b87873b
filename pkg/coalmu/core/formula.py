# coalmu/core/formula.py
"""Negation normal form formulas over a modal signature.

Formulas are immutable and hashable. Every node caches its hash and its
canonical sort key, so sequents (frozensets of formulas) can be hashed and
ordered cheaply during game exploration.
"""
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple
import logging

from coalmu.core.exceptions import GuardednessError
from coalmu.core.signature import Modality

logger = logging.getLogger(__name__)

Sequent = FrozenSet["Formula"]

# node kind tags used by the canonical order
TAG_VAR = 0
TAG_MODAL = 1
TAG_AND = 2
TAG_OR = 3
TAG_MU = 4
TAG_NU = 5


class Formula:
    """Common behaviour of all formula nodes"""

    __slots__ = ()

    def __hash__(self):
        return self._hash

    def __lt__(self, other: "Formula") -> bool:
        return self.key < other.key

    @property
    def depth(self) -> int:
        return self.key[0]

    def __str__(self) -> str:
        return render(self)


def _seal(node, key: tuple) -> None:
    object.__setattr__(node, "key", key)
    object.__setattr__(node, "_hash", hash(key))


@dataclass(frozen=True, eq=True)
class Var(Formula):
    name: str
    positive: bool = True
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _seal(self, (0, TAG_VAR, self.name, 0 if self.positive else 1))

    __hash__ = Formula.__hash__


@dataclass(frozen=True, eq=True)
class Modal(Formula):
    op: Modality
    arg: Formula
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _seal(self, (self.arg.depth + 1, TAG_MODAL, self.op.sort_key(), self.arg.key))

    __hash__ = Formula.__hash__


@dataclass(frozen=True, eq=True)
class And(Formula):
    left: Formula
    right: Formula
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        depth = max(self.left.depth, self.right.depth) + 1
        _seal(self, (depth, TAG_AND, "", self.left.key, self.right.key))

    __hash__ = Formula.__hash__


@dataclass(frozen=True, eq=True)
class Or(Formula):
    left: Formula
    right: Formula
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        depth = max(self.left.depth, self.right.depth) + 1
        _seal(self, (depth, TAG_OR, "", self.left.key, self.right.key))

    __hash__ = Formula.__hash__


@dataclass(frozen=True, eq=True)
class Mu(Formula):
    var: str
    body: Formula
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _seal(self, (self.body.depth + 1, TAG_MU, self.var, self.body.key))

    __hash__ = Formula.__hash__


@dataclass(frozen=True, eq=True)
class Nu(Formula):
    var: str
    body: Formula
    key: tuple = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _seal(self, (self.body.depth + 1, TAG_NU, self.var, self.body.key))

    __hash__ = Formula.__hash__


FIXPOINTS = (Mu, Nu)


def is_fixpoint(a: Formula) -> bool:
    return isinstance(a, FIXPOINTS)


def is_atomic(a: Formula) -> bool:
    """Variables, negated variables and modal atoms"""
    return isinstance(a, (Var, Modal))


def canonical(formulas: Iterable[Formula]) -> List[Formula]:
    return sorted(formulas, key=lambda f: f.key)


def sequent(*formulas: Formula) -> Sequent:
    return frozenset(formulas)


# Negation and substitution

def negate(a: Formula, bound: FrozenSet[str] = frozenset()) -> Formula:
    """Dual of an NNF formula; bound variables keep their polarity"""
    if isinstance(a, Var):
        if a.name in bound:
            return a
        return Var(a.name, not a.positive)
    if isinstance(a, And):
        return Or(negate(a.left, bound), negate(a.right, bound))
    if isinstance(a, Or):
        return And(negate(a.left, bound), negate(a.right, bound))
    if isinstance(a, Modal):
        return Modal(a.op.negated(), negate(a.arg, bound))
    if isinstance(a, Mu):
        return Nu(a.var, negate(a.body, bound | {a.var}))
    if isinstance(a, Nu):
        return Mu(a.var, negate(a.body, bound | {a.var}))
    raise TypeError(f"Not a formula: {a!r}")


def substitute(a: Formula, var: str, replacement: Formula) -> Formula:
    """Replace the free positive occurrences of var"""
    if isinstance(a, Var):
        if a.name == var and a.positive:
            return replacement
        return a
    if isinstance(a, And):
        return And(substitute(a.left, var, replacement), substitute(a.right, var, replacement))
    if isinstance(a, Or):
        return Or(substitute(a.left, var, replacement), substitute(a.right, var, replacement))
    if isinstance(a, Modal):
        return Modal(a.op, substitute(a.arg, var, replacement))
    if a.var == var:
        return a
    return type(a)(a.var, substitute(a.body, var, replacement))


def unfold(a: Formula) -> Formula:
    """A[p := ηp.A] for a fixpoint formula ηp.A"""
    return substitute(a.body, a.var, a)


def free_variables(a: Formula, bound: FrozenSet[str] = frozenset()) -> FrozenSet[str]:
    if isinstance(a, Var):
        return frozenset() if a.name in bound else frozenset({a.name})
    if isinstance(a, (And, Or)):
        return free_variables(a.left, bound) | free_variables(a.right, bound)
    if isinstance(a, Modal):
        return free_variables(a.arg, bound)
    return free_variables(a.body, bound | {a.var})


def binders(a: Formula) -> List[str]:
    """Bound variable names in preorder, with repetitions"""
    if isinstance(a, Var):
        return []
    if isinstance(a, (And, Or)):
        return binders(a.left) + binders(a.right)
    if isinstance(a, Modal):
        return binders(a.arg)
    return [a.var] + binders(a.body)


# Clean and guarded

def _unguarded(a: Formula, guards: Dict[str, bool]) -> Optional[str]:
    if isinstance(a, Var):
        if a.name in guards and not guards[a.name]:
            return a.name
        return None
    if isinstance(a, (And, Or)):
        return _unguarded(a.left, guards) or _unguarded(a.right, guards)
    if isinstance(a, Modal):
        return _unguarded(a.arg, {name: True for name in guards})
    inner = dict(guards)
    inner[a.var] = False
    return _unguarded(a.body, inner)


def _clean_guarded_problem(gamma: Iterable[Formula]) -> Optional[Tuple[str, str]]:
    gamma = canonical(gamma)
    seen: Set[str] = set()
    free: Set[str] = set()
    for a in gamma:
        free |= free_variables(a)
    for a in gamma:
        for name in binders(a):
            if name in seen:
                return f"not clean: variable {name} is bound twice", name
            if name in free:
                return f"not clean: variable {name} occurs both free and bound", name
            seen.add(name)
    for a in gamma:
        name = _unguarded(a, {})
        if name is not None:
            return f"not guarded: variable {name} occurs outside the scope of a modal operator", name
    return None


def check_clean_guarded(gamma: Iterable[Formula]) -> Optional[str]:
    """None when the sequent is clean and guarded, otherwise a diagnostic"""
    problem = _clean_guarded_problem(gamma)
    return problem[0] if problem else None


def ensure_clean_guarded(gamma: Iterable[Formula]) -> None:
    problem = _clean_guarded_problem(gamma)
    if problem is not None:
        raise GuardednessError(*problem)


def _all_names(a: Formula) -> Set[str]:
    if isinstance(a, Var):
        return {a.name}
    if isinstance(a, (And, Or)):
        return _all_names(a.left) | _all_names(a.right)
    if isinstance(a, Modal):
        return _all_names(a.arg)
    return {a.var} | _all_names(a.body)


def make_clean(gamma: Iterable[Formula]) -> Sequent:
    """Rename binders apart so that the sequent is clean"""
    gamma = canonical(gamma)
    names: Set[str] = set()
    free: Set[str] = set()
    for a in gamma:
        names |= _all_names(a)
        free |= free_variables(a)
    taken: Set[str] = set(free)

    def fresh(name: str) -> str:
        counter = 1
        while f"{name}{counter}" in names:
            counter += 1
        new_name = f"{name}{counter}"
        names.add(new_name)
        return new_name

    def rename(a: Formula) -> Formula:
        if isinstance(a, Var):
            return a
        if isinstance(a, And):
            return And(rename(a.left), rename(a.right))
        if isinstance(a, Or):
            return Or(rename(a.left), rename(a.right))
        if isinstance(a, Modal):
            return Modal(a.op, rename(a.arg))
        var, body = a.var, a.body
        if var in taken:
            new_var = fresh(var)
            body = substitute(body, var, Var(new_var))
            logger.debug(f"Renamed binder {var} to {new_var}")
            var = new_var
        taken.add(var)
        return type(a)(var, rename(body))

    return frozenset(rename(a) for a in gamma)


# Closure and parity map

def closure(gamma: Iterable[Formula]) -> FrozenSet[Formula]:
    """Smallest set containing gamma closed under components and unfolding"""
    result: Set[Formula] = set()
    todo = list(gamma)
    while todo:
        a = todo.pop()
        if a in result:
            continue
        result.add(a)
        if isinstance(a, (And, Or)):
            todo.extend((a.left, a.right))
        elif isinstance(a, Modal):
            todo.append(a.arg)
        elif is_fixpoint(a):
            todo.append(unfold(a))
    return frozenset(result)


def _assign_priorities(a: Formula, out: Dict[str, int]) -> int:
    if isinstance(a, Var):
        return 0
    if isinstance(a, (And, Or)):
        return max(_assign_priorities(a.left, out), _assign_priorities(a.right, out))
    if isinstance(a, Modal):
        return _assign_priorities(a.arg, out)
    inner = _assign_priorities(a.body, out)
    priority = max(inner, 1)
    wanted = 1 if isinstance(a, Mu) else 0
    if priority % 2 != wanted:
        priority += 1
    out[a.var] = priority
    return priority


def binder_nesting(gamma: Iterable[Formula]) -> Dict[str, Set[str]]:
    """For each binder, the binders occurring inside its body"""
    nesting: Dict[str, Set[str]] = {}

    def walk(a: Formula) -> Set[str]:
        if isinstance(a, Var):
            return set()
        if isinstance(a, (And, Or)):
            return walk(a.left) | walk(a.right)
        if isinstance(a, Modal):
            return walk(a.arg)
        inside = walk(a.body)
        nesting[a.var] = set(inside)
        return inside | {a.var}

    for a in gamma:
        walk(a)
    return nesting


@dataclass(frozen=True)
class ParityMap:
    """Priorities Ω on the closure of a clean sequent"""

    priorities: Dict[Formula, int]
    by_variable: Dict[str, int]

    def __call__(self, a: Formula) -> int:
        if is_fixpoint(a):
            return self.by_variable[a.var]
        return 0

    @property
    def max_priority(self) -> int:
        return max(self.priorities.values(), default=0)


def parity_map(gamma: Iterable[Formula]) -> ParityMap:
    """Priorities by binder nesting: outer binders dominate inner ones"""
    gamma = list(gamma)
    by_variable: Dict[str, int] = {}
    for a in gamma:
        _assign_priorities(a, by_variable)
    priorities = {}
    for a in closure(gamma):
        priorities[a] = by_variable[a.var] if is_fixpoint(a) else 0
    return ParityMap(priorities, by_variable)


def validate_parity_map(gamma: Iterable[Formula], omega: ParityMap) -> List[str]:
    """Violations of the parity map conditions, empty when valid"""
    gamma = list(gamma)
    problems = []
    cl = closure(gamma)
    for a in canonical(cl):
        value = omega.priorities.get(a)
        if value is None:
            problems.append(f"no priority for {render(a)}")
        elif not is_fixpoint(a) and value != 0:
            problems.append(f"non-fixpoint {render(a)} has priority {value}")
        elif isinstance(a, Mu) and value % 2 != 1:
            problems.append(f"least fixpoint {render(a)} has even priority {value}")
        elif isinstance(a, Nu) and value % 2 != 0:
            problems.append(f"greatest fixpoint {render(a)} has odd priority {value}")
        elif value > len(cl):
            problems.append(f"priority {value} of {render(a)} exceeds closure size {len(cl)}")
    for outer, inner_vars in binder_nesting(gamma).items():
        for inner in inner_vars:
            if omega.by_variable.get(inner, 0) > omega.by_variable.get(outer, 0):
                problems.append(f"binder {inner} inside {outer} has a larger priority")
    return problems


# Size measure

def size(a: Formula) -> int:
    if isinstance(a, Var):
        return 1
    if isinstance(a, (And, Or)):
        return 1 + size(a.left) + size(a.right)
    if isinstance(a, Modal):
        return 1 + a.op.size() + size(a.arg)
    return 1 + size(a.body)


def sequent_size(gamma: Iterable[Formula]) -> int:
    return sum(size(a) for a in gamma)


# Printing

def render(a: Formula) -> str:
    if isinstance(a, Var):
        return a.name if a.positive else f"~{a.name}"
    if isinstance(a, And):
        return f"({render(a.left)} & {render(a.right)})"
    if isinstance(a, Or):
        return f"({render(a.left)} | {render(a.right)})"
    if isinstance(a, Modal):
        return f"{a.op.render()} {render(a.arg)}"
    binder = "mu" if isinstance(a, Mu) else "nu"
    return f"({binder} {a.var}. {render(a.body)})"


def render_sequent(gamma: Iterable[Formula]) -> List[str]:
    return [render(a) for a in canonical(gamma)]
