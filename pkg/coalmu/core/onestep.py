# coalmu/core/onestep.py
"""One-step rules, rule blueprints and the brute-force one-step oracle."""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import chain, combinations, product
from math import ceil, floor, lcm
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union
import logging
import random

from sympy import Rational, Symbol
from sympy.logic.boolalg import BooleanFalse, BooleanTrue
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax

from coalmu.core.config import get_settings
from coalmu.core.exceptions import CapExceeded, CertificateError
from coalmu.core.formula import (
    And,
    Formula,
    Modal,
    Or,
    Sequent,
    Var,
    canonical,
    is_fixpoint,
    negate,
    render,
    unfold,
)
from coalmu.core.semantics import GameFrame, lifting_member
from coalmu.schemas.audit import AuditReport
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

RULE_TAGS = ("K", "G", "P", "C1", "C2", "M")


@dataclass(frozen=True)
class OneStepRule:
    """A monotone one-step rule over the variables p0, p1, ...

    Premise atom i applies ``premise[i]`` to variable ``p{i}``. Each
    conclusion lists the indices of the variables it contains.
    """

    tag: str
    premise: Tuple[Modality, ...]
    conclusions: Tuple[Tuple[int, ...], ...]
    code: Tuple = ()

    def variables(self) -> List[str]:
        return [f"p{i}" for i in range(len(self.premise))]

    def premise_atoms(self) -> List[Formula]:
        return [Modal(op, Var(f"p{i}")) for i, op in enumerate(self.premise)]

    def conclusion_sequents(self) -> List[Sequent]:
        return [frozenset(Var(f"p{i}") for i in c) for c in self.conclusions]

    def describe(self) -> str:
        premise = ", ".join(render(a) for a in self.premise_atoms())
        code = f" {self.code}" if self.code else ""
        return f"{self.tag}{code}: {premise}"


@dataclass(frozen=True)
class PrincipalAnd:
    formula: Formula


@dataclass(frozen=True)
class PrincipalOr:
    formula: Formula


@dataclass(frozen=True)
class PrincipalFix:
    formula: Formula


@dataclass(frozen=True)
class Axiom:
    formula: Formula
    negation: Formula


@dataclass(frozen=True)
class ModalInstance:
    rule: OneStepRule
    args: Tuple[Formula, ...]

    def premise(self) -> List[Formula]:
        return [Modal(op, arg) for op, arg in zip(self.rule.premise, self.args)]

    def substitution(self) -> Dict[str, Formula]:
        return dict(zip(self.rule.variables(), self.args))


Blueprint = Union[PrincipalAnd, PrincipalOr, PrincipalFix, Axiom, ModalInstance]


def describe_blueprint(blueprint: Blueprint) -> str:
    if isinstance(blueprint, PrincipalAnd):
        return f"and {render(blueprint.formula)}"
    if isinstance(blueprint, PrincipalOr):
        return f"or {render(blueprint.formula)}"
    if isinstance(blueprint, PrincipalFix):
        return f"fix {render(blueprint.formula)}"
    if isinstance(blueprint, Axiom):
        return f"axiom {render(blueprint.formula)}"
    premise = ", ".join(render(a) for a in blueprint.premise())
    code = f" {tuple(str(c) for c in blueprint.rule.code)}" if blueprint.rule.code else ""
    return f"{blueprint.rule.tag}{code} {premise}"


def blueprint_conclusions(delta: Sequent, blueprint: Blueprint) -> List[Sequent]:
    """Conclusion sequents of the rule induced by (delta, blueprint), in order"""
    if isinstance(blueprint, PrincipalAnd):
        rest = delta - {blueprint.formula}
        return [rest | {blueprint.formula.left, blueprint.formula.right}]
    if isinstance(blueprint, PrincipalOr):
        rest = delta - {blueprint.formula}
        return [rest | {blueprint.formula.left}, rest | {blueprint.formula.right}]
    if isinstance(blueprint, PrincipalFix):
        return [(delta - {blueprint.formula}) | {unfold(blueprint.formula)}]
    if isinstance(blueprint, Axiom):
        return []
    return [frozenset(blueprint.args[i] for i in c) for c in blueprint.rule.conclusions]


def is_applicable(delta: Sequent, blueprint: Blueprint) -> bool:
    if isinstance(blueprint, PrincipalAnd):
        return isinstance(blueprint.formula, And) and blueprint.formula in delta
    if isinstance(blueprint, PrincipalOr):
        return isinstance(blueprint.formula, Or) and blueprint.formula in delta
    if isinstance(blueprint, PrincipalFix):
        return is_fixpoint(blueprint.formula) and blueprint.formula in delta
    if isinstance(blueprint, Axiom):
        return (
            blueprint.formula in delta
            and blueprint.negation in delta
            and negate(blueprint.formula) == blueprint.negation
        )
    premise = blueprint.premise()
    return len(set(premise)) == len(premise) and set(premise) <= delta


@dataclass(frozen=True)
class RuleRepresentation:
    sequent: Sequent
    blueprint: Blueprint

    def conclusions(self) -> List[Sequent]:
        return blueprint_conclusions(self.sequent, self.blueprint)


def conclusions(rep: RuleRepresentation) -> List[Sequent]:
    return rep.conclusions()


# Prime implicants

@lru_cache(maxsize=65536)
def _prime_valuations(terms: Tuple[Tuple[int, bool], ...], k: int) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
    # f(v) = const + sum(c_i v_i) < k with c_i the effective coefficients
    const = sum(r for r, barred in terms if barred)
    effective = [-r if barred else r for r, barred in terms]
    forced = [1 if c < 0 else 0 for c in effective]
    slack = [max(0, c) for c in effective]

    def worst(domain: Tuple[int, ...]) -> int:
        total = const + sum(slack)
        for i in domain:
            total += effective[i] * forced[i] - slack[i]
        return total

    found = []
    n = len(terms)
    for size in range(n + 1):
        for domain in combinations(range(n), size):
            if worst(domain) >= k:
                continue
            if any(worst(domain[:j] + domain[j + 1:]) < k for j in range(size)):
                continue
            found.append(tuple((i, forced[i]) for i in domain))
    found.sort(key=lambda p: (tuple(i for i, _ in p), tuple(v for _, v in p)))
    return tuple(found)


def prime_implicants(coeffs: Sequence[Tuple[str, int, bool]], k: int) -> List[Sequent]:
    """Sequents of literals for the prime implicants of a linear inequality.

    ``coeffs`` lists (variable, r, barred); a plain entry contributes r*v,
    a barred one r*(1 - v), and the inequality is sum < k.
    """
    if any(r == 0 for _, r, _ in coeffs):
        raise ValueError("prime implicants need nonzero coefficients")
    names = [name for name, _, _ in coeffs]
    terms = tuple((r, barred) for _, r, barred in coeffs)
    return [
        frozenset(Var(names[i], value == 1) for i, value in valuation)
        for valuation in _prime_valuations(terms, k)
    ]


def _implicant_conclusions(terms: Tuple[Tuple[int, bool], ...], k: int) -> Tuple[Tuple[int, ...], ...]:
    result = []
    for valuation in _prime_valuations(terms, k):
        if any(value != 1 for _, value in valuation):
            raise ValueError("conclusion violates the sign property")
        result.append(tuple(i for i, _ in valuation))
    return tuple(result)


# Rule construction

def _coalitions_disjoint(ops: Sequence[Modality]) -> bool:
    seen = set()
    for op in ops:
        if seen & op.index:
            return False
        seen |= op.index
    return True


def _all_indices(n: int) -> Tuple[Tuple[int, ...], ...]:
    return (tuple(range(n)),)


def _graded_rule(ops: Sequence[Modality], coefficients: Sequence[int]) -> Optional[OneStepRule]:
    lower = sum(c * (op.index + 1) for op, c in zip(ops, coefficients) if not op.dual)
    upper = sum(c * op.index for op, c in zip(ops, coefficients) if op.dual)
    if not any(not op.dual for op in ops) or lower < 1 + upper:
        return None
    terms = tuple((c, op.dual) if op.dual else (-c, False) for op, c in zip(ops, coefficients))
    code = tuple(chain.from_iterable((c, op.index) for op, c in zip(ops, coefficients))) + (0,)
    return OneStepRule("G", tuple(ops), _implicant_conclusions(terms, 0), code)


def _probabilistic_bound(ops: Sequence[Modality], coefficients: Sequence[int]) -> int:
    lower = sum(c * Fraction(op.index) for op, c in zip(ops, coefficients) if not op.dual)
    upper = sum(c * Fraction(op.index) for op, c in zip(ops, coefficients) if op.dual)
    if any(op.dual for op in ops):
        return ceil(upper - lower)
    return floor(-lower) + 1


def _probabilistic_rule(ops: Sequence[Modality], coefficients: Sequence[int]) -> OneStepRule:
    k = _probabilistic_bound(ops, coefficients)
    terms = tuple((c, op.dual) if op.dual else (-c, False) for op, c in zip(ops, coefficients))
    code = tuple(chain.from_iterable((c, Fraction(op.index)) for op, c in zip(ops, coefficients))) + (k,)
    return OneStepRule("P", tuple(ops), _implicant_conclusions(terms, k), code)


def instantiate(sig: Signature, tag: str, atoms: Sequence[Formula], code: Sequence = ()) -> OneStepRule:
    """Rebuild a rule instance from its premise atoms and code, checking side conditions"""
    ops = tuple(a.op for a in atoms)
    if any(not isinstance(a, Modal) for a in atoms):
        raise CertificateError("rule premise must consist of modal atoms")
    for op in ops:
        sig.validate(op)
    n = len(ops)
    if tag == "K" and sig.kind == KRIPKE:
        if sum(1 for op in ops if op.dual) != 1:
            raise CertificateError("K rule needs exactly one diamond")
        return OneStepRule("K", ops, _all_indices(n))
    if tag == "M" and sig.kind == MONOTONE:
        if sorted(op.dual for op in ops) != [False, True]:
            raise CertificateError("M rule needs one box and one diamond")
        return OneStepRule("M", ops, _all_indices(n))
    if tag == "C1" and sig.kind == COALITION:
        if n == 0 or any(op.dual for op in ops) or not _coalitions_disjoint(ops):
            raise CertificateError("C1 rule needs nonempty pairwise disjoint coalitions")
        return OneStepRule("C1", ops, _all_indices(n))
    if tag == "C2" and sig.kind == COALITION:
        positives = [op for op in ops if not op.dual]
        duals = [op for op in ops if op.dual]
        if not duals:
            raise CertificateError("C2 rule needs a dual coalition atom")
        target = duals[0].index
        if not _coalitions_disjoint(positives) or any(not op.index <= target for op in positives):
            raise CertificateError("C2 coalitions must be disjoint subsets of the dual coalition")
        if any(op.index != sig.grand_coalition for op in duals[1:]):
            raise CertificateError("C2 side atoms must use the grand coalition")
        return OneStepRule("C2", ops, _all_indices(n))
    if tag in ("G", "P") and sig.kind in (GRADED, PROBABILISTIC):
        if len(code) != 2 * n + 1:
            raise CertificateError(f"{tag} code has wrong length")
        if any(Fraction(code[2 * i]).denominator != 1 for i in range(n)):
            raise CertificateError(f"{tag} coefficients must be integers")
        coefficients = [int(code[2 * i]) for i in range(n)]
        indices = [code[2 * i + 1] for i in range(n)]
        if any(c < 1 for c in coefficients):
            raise CertificateError(f"{tag} coefficients must be positive")
        if any(Fraction(index) != Fraction(op.index) for index, op in zip(indices, ops)):
            raise CertificateError(f"{tag} code does not match the premise indices")
        if tag == "G" and sig.kind == GRADED:
            rule = _graded_rule(ops, coefficients)
            if rule is None or code[-1] != 0:
                raise CertificateError("G side condition fails")
            return rule
        if tag == "P" and sig.kind == PROBABILISTIC:
            if n == 0:
                raise CertificateError("P rule needs a premise")
            rule = _probabilistic_rule(ops, coefficients)
            if code[-1] != rule.code[-1]:
                raise CertificateError("P bound does not satisfy the side condition")
            return rule
    raise CertificateError(f"rule {tag} does not belong to the {sig.kind} logic")


# Blueprint enumeration

def _subsets(items: Sequence, min_size: int = 0) -> Iterable[Tuple]:
    return chain.from_iterable(combinations(items, size) for size in range(min_size, len(items) + 1))


def default_coefficient_bound(sig: Signature, atoms: Sequence[Formula]) -> int:
    if sig.kind == GRADED:
        return sum(a.op.index for a in atoms) + len(atoms) + 1
    if sig.kind == PROBABILISTIC:
        denominators = [Fraction(a.op.index).denominator for a in atoms]
        return lcm(*denominators, 1) + len(atoms) + 1
    return 0


@dataclass(frozen=True)
class CoefficientBounds:
    """Upper bound B on (G)/(P) coefficients; None selects the default"""

    bound: Optional[int] = None

    def for_atoms(self, sig: Signature, atoms: Sequence[Formula]) -> int:
        if self.bound is not None:
            return self.bound
        return default_coefficient_bound(sig, atoms)


class RuleEngine:
    """Enumerates rule blueprints for the sequents of one session"""

    def __init__(self, sig: Signature, bounds: CoefficientBounds = CoefficientBounds()):
        self.sig = sig
        self.bounds = bounds
        self._cache: Dict[Sequent, List[Blueprint]] = {}

    def blueprints(self, delta: Sequent) -> List[Blueprint]:
        cached = self._cache.get(delta)
        if cached is None:
            cached = self._enumerate(delta)
            self._cache[delta] = cached
        return cached

    def _enumerate(self, delta: Sequent) -> List[Blueprint]:
        ordered = canonical(delta)
        result: List[Blueprint] = []
        for a in ordered:
            if isinstance(a, And):
                result.append(PrincipalAnd(a))
            elif isinstance(a, Or):
                result.append(PrincipalOr(a))
            elif is_fixpoint(a):
                result.append(PrincipalFix(a))
        for a in ordered:
            negation = negate(a)
            if negation in delta and a.key < negation.key:
                result.append(Axiom(a, negation))
        result.extend(self.modal_instances(delta))
        return result

    def modal_instances(self, delta: Sequent) -> List[ModalInstance]:
        atoms = [a for a in canonical(delta) if isinstance(a, Modal)]
        seen = set()
        instances = []
        for rule, chosen in self._rules(atoms):
            args = tuple(a.arg for a in chosen)
            instance = ModalInstance(rule, args)
            signature = (
                frozenset(chosen),
                frozenset(frozenset(c) for c in blueprint_conclusions(delta, instance)),
            )
            if signature in seen:
                continue
            seen.add(signature)
            instances.append(instance)
        return instances

    def _rules(self, atoms: List[Formula]):
        kind = self.sig.kind
        boxes = [a for a in atoms if not a.op.dual]
        diamonds = [a for a in atoms if a.op.dual]
        if kind == KRIPKE:
            for d in diamonds:
                for chosen_boxes in _subsets(boxes):
                    chosen = (d,) + chosen_boxes
                    yield OneStepRule("K", tuple(a.op for a in chosen), _all_indices(len(chosen))), chosen
        elif kind == MONOTONE:
            for b in boxes:
                for d in diamonds:
                    yield OneStepRule("M", (b.op, d.op), _all_indices(2)), (b, d)
        elif kind == COALITION:
            yield from self._coalition_rules(boxes, diamonds)
        elif kind in (GRADED, PROBABILISTIC):
            yield from self._linear_rules(atoms)

    def _coalition_rules(self, positives: List[Formula], duals: List[Formula]):
        for chosen in _subsets(positives, 1):
            ops = tuple(a.op for a in chosen)
            if _coalitions_disjoint(ops):
                yield OneStepRule("C1", ops, _all_indices(len(ops))), chosen
        grand = self.sig.grand_coalition
        for d in duals:
            side = [a for a in duals if a != d and a.op.index == grand]
            eligible = [a for a in positives if a.op.index <= d.op.index]
            for chosen_positive in _subsets(eligible):
                if not _coalitions_disjoint([a.op for a in chosen_positive]):
                    continue
                for chosen_side in _subsets(side):
                    chosen = chosen_positive + (d,) + chosen_side
                    yield OneStepRule("C2", tuple(a.op for a in chosen), _all_indices(len(chosen))), chosen

    def _linear_rules(self, atoms: List[Formula]):
        bound = self.bounds.for_atoms(self.sig, atoms)
        for chosen in _subsets(atoms, 1):
            # lower-bound atoms first, matching the (r, a, ..., s, b, ..., k) coding
            chosen = tuple(a for a in chosen if not a.op.dual) + tuple(a for a in chosen if a.op.dual)
            ops = tuple(a.op for a in chosen)
            for coefficients in product(range(1, bound + 1), repeat=len(ops)):
                if self.sig.kind == GRADED:
                    rule = _graded_rule(ops, coefficients)
                    if rule is None:
                        continue
                else:
                    rule = _probabilistic_rule(ops, coefficients)
                yield rule, chosen


def enumerate_blueprints(delta: Sequent, sig: Signature, bounds: CoefficientBounds = CoefficientBounds()) -> List[Blueprint]:
    return RuleEngine(sig, bounds).blueprints(delta)


# One-step oracle

def _extension(arg: Formula, tau: Dict[str, FrozenSet], carrier: FrozenSet) -> FrozenSet:
    if not isinstance(arg, Var):
        raise ValueError(f"one-step atoms must apply to variables, got {render(arg)}")
    value = frozenset(tau.get(arg.name, frozenset()))
    return value if arg.positive else carrier - value


def undecided_constraints(constraints):
    """Constraints sympy has not already decided, or False if one is violated"""
    kept = []
    for c in constraints:
        if isinstance(c, BooleanTrue) or c is True:
            continue
        if isinstance(c, BooleanFalse) or c is False:
            return False
        kept.append(c)
    return kept


def _probabilistic_sat(atoms: List[Tuple[Modality, FrozenSet]], carrier: List) -> bool:
    mass = {x: Symbol(f"m{i}") for i, x in enumerate(carrier)}
    slack = Symbol("eps")
    constraints = [m >= 0 for m in mass.values()]
    constraints.append(sum(mass.values()) >= 1)
    constraints.append(sum(mass.values()) <= 1)
    constraints.append(slack <= 1)
    for op, extension in atoms:
        index = Rational(Fraction(op.index).numerator, Fraction(op.index).denominator)
        if op.dual:
            # not mu(X \ U) >= p, i.e. mu(X \ U) < p
            weight = sum((mass[x] for x in carrier if x not in extension), Rational(0))
            constraints.append(weight + slack <= index)
        else:
            weight = sum((mass[x] for x in extension), Rational(0))
            constraints.append(weight >= index)
    kept = undecided_constraints(constraints)
    if kept is False:
        return False
    try:
        best, _ = lpmax(slack, kept)
    except InfeasibleLPError:
        return False
    except UnboundedLPError:
        return True
    return bool(best > 0)


def _upward_generators(carrier: List) -> Iterable[FrozenSet[FrozenSet]]:
    subsets = [frozenset(s) for s in _subsets(carrier)]
    for family in _subsets(subsets):
        if all(not (a < b) for a in family for b in family):
            yield frozenset(family)


def _game_frames(agents: int, carrier: List, cap: int) -> Iterable[GameFrame]:
    for sizes in product(range(1, cap + 1), repeat=agents):
        profiles = list(product(*(range(s) for s in sizes)))
        for outcomes in product(carrier, repeat=len(profiles)):
            yield GameFrame(tuple(sizes), dict(zip(profiles, outcomes)))


def _candidate_structures(sig: Signature, carrier: List, atoms: List[Tuple[Modality, FrozenSet]]):
    if sig.kind == KRIPKE:
        for s in _subsets(carrier):
            yield frozenset(s)
    elif sig.kind == MONOTONE:
        yield from _upward_generators(carrier)
    elif sig.kind == GRADED:
        cap = max((op.index for op, _ in atoms), default=0) + 1
        for counts in product(range(cap + 1), repeat=len(carrier)):
            yield dict(zip(carrier, counts))
    elif sig.kind == COALITION:
        yield from _game_frames(sig.agents, carrier, settings.ONESTEP_STRATEGY_CAP)


def one_step_sat(atoms: Iterable[Formula], tau: Dict[str, FrozenSet], carrier: Iterable, sig: Signature) -> bool:
    """Is there t in TX satisfying every atom under the valuation tau?"""
    carrier = list(carrier)
    if len(carrier) > settings.ONESTEP_STATE_CAP:
        raise CapExceeded(
            f"One-step carrier has {len(carrier)} elements, cap is {settings.ONESTEP_STATE_CAP}"
        )
    universe = frozenset(carrier)
    interpreted = [(a.op, _extension(a.arg, tau, universe)) for a in atoms]
    if sig.kind == PROBABILISTIC:
        return _probabilistic_sat(interpreted, carrier)
    for structure in _candidate_structures(sig, carrier, interpreted):
        if all(lifting_member(op, structure, extension, universe) for op, extension in interpreted):
            return True
    return False


def _conclusion_sat(sequent: Sequent, tau: Dict[str, FrozenSet], universe: FrozenSet) -> bool:
    remaining = universe
    for literal in sequent:
        remaining = remaining & _extension(literal, tau, universe)
    return bool(remaining)


def audit_sequent(atoms: Sequence[Formula], tau: Dict[str, FrozenSet], carrier: Sequence, sig: Signature,
                  bounds: CoefficientBounds = CoefficientBounds()) -> Tuple[List[str], List[str]]:
    """Soundness and completeness failures of the rule set on one modal sequent"""
    universe = frozenset(carrier)
    delta = frozenset(atoms)
    instances = RuleEngine(sig, bounds).modal_instances(delta)
    unsound = []
    premise_cache: Dict[FrozenSet, bool] = {}
    for instance in instances:
        premise = frozenset(instance.premise())
        if premise not in premise_cache:
            premise_cache[premise] = one_step_sat(premise, tau, carrier, sig)
        if not premise_cache[premise]:
            continue
        if not any(_conclusion_sat(c, tau, universe) for c in blueprint_conclusions(delta, instance)):
            unsound.append(instance.rule.describe())
    incomplete = []
    if not one_step_sat(atoms, tau, carrier, sig):
        closing = [
            instance for instance in instances
            if not any(_conclusion_sat(c, tau, universe) for c in blueprint_conclusions(delta, instance))
        ]
        if not closing:
            incomplete.append("no rule instance refutes the unsatisfiable premise")
    return unsound, incomplete


def _random_modality(sig: Signature, rng: random.Random) -> Modality:
    dual = rng.random() < 0.5
    if sig.kind == GRADED:
        return Modality(GRADED, dual, rng.randint(0, 2))
    if sig.kind == PROBABILISTIC:
        index = rng.choice([Fraction(0), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(1)])
        return Modality(PROBABILISTIC, dual, index)
    if sig.kind == COALITION:
        agents = sorted(sig.grand_coalition)
        members = frozenset(a for a in agents if rng.random() < 0.5)
        return Modality(COALITION, dual, members)
    return Modality(sig.kind, dual)


def audit_ruleset(sig: Signature, samples: int, bounds: CoefficientBounds = CoefficientBounds(),
                  seed: Optional[int] = None) -> AuditReport:
    """Spot-check one-step soundness and completeness against the oracle"""
    rng = random.Random(settings.RANDOM_SEED if seed is None else seed)
    small = sig.kind == COALITION
    max_states = 2 if small else 3
    max_atoms = 2 if small else 3
    soundness = []
    completeness = []
    for sample in range(samples):
        carrier = list(range(rng.randint(1, max_states)))
        count = rng.randint(1, max_atoms)
        atoms = []
        for i in range(count):
            atoms.append(Modal(_random_modality(sig, rng), Var(f"p{i}")))
        atoms = list(dict.fromkeys(atoms))
        tau = {f"p{i}": frozenset(x for x in carrier if rng.random() < 0.5) for i in range(count)}
        unsound, incomplete = audit_sequent(atoms, tau, carrier, sig, bounds)
        case = {
            "atoms": [render(a) for a in atoms],
            "carrier": len(carrier),
            "valuation": {name: sorted(value) for name, value in sorted(tau.items())},
        }
        for rule in unsound:
            soundness.append({**case, "rule": rule})
        for reason in incomplete:
            completeness.append({**case, "rule": reason})
    logger.info(
        f"Audited {samples} samples for {sig.label()}: {len(soundness)} soundness and "
        f"{len(completeness)} completeness counterexamples"
    )
    notes = []
    if sig.kind == PROBABILISTIC:
        notes.append(
            "(P) instances use the conclusion sum(s_j ~q_j) - sum(r_i p_i) < k with "
            "k minimal for sum(s_j b_j) - sum(r_i a_i) <= k, strict when no upper-bound atoms occur"
        )
    return AuditReport(
        logic=sig.label(),
        samples=samples,
        coefficient_bound=bounds.bound,
        soundness_counterexamples=soundness,
        completeness_counterexamples=completeness,
        notes=notes,
    )
